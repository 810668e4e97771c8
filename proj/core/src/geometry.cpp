#include <overtake/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include <overtake/errors.hpp>
#include <overtake/math.hpp>

namespace overtake
{
namespace
{

// (sin(phi)/phi, (1 - cos(phi))/phi) with their small-angle limits.
std::pair<double, double> arc_factors (double phi)
{
    if (std::abs (phi) < 1e-8)
        return {1.0 - phi * phi / 6.0, 0.5 * phi};
    const double half = std::sin (0.5 * phi);
    return {std::sin (phi) / phi, 2.0 * half * half / phi};
}

CenterlineSample advance_from (const CenterlineSample &from, double curvature, double ds)
{
    const auto [sinc, cosc] = arc_factors (curvature * ds);
    const double ch = std::cos (from.heading), sh = std::sin (from.heading);
    CenterlineSample out;
    out.x = from.x + ds * (ch * sinc - sh * cosc);
    out.y = from.y + ds * (sh * sinc + ch * cosc);
    out.s = from.s + ds;
    out.heading = wrap_angle (from.heading + curvature * ds);
    return out;
}

double cross (const Eigen::Vector2d &a, const Eigen::Vector2d &b) { return a.x () * b.y () - a.y () * b.x (); }

} // namespace

Centerline Centerline::from_pieces (std::span<const CenterlinePiece> pieces, double max_spacing,
                                    CenterlineSample origin)
{
    if (pieces.empty ())
        throw PreconditionError ("Centerline: at least one piece required");
    if (!(max_spacing > 0.0))
        throw PreconditionError ("Centerline: max_spacing must be positive");
    Centerline line;
    line.max_spacing_ = max_spacing;
    origin.s = 0.0;
    line.samples_.push_back (origin);
    for (const auto &piece : pieces)
    {
        if (!(piece.length > 0.0))
            throw PreconditionError ("Centerline: piece length must be positive");
        const auto n = static_cast<std::size_t> (std::ceil (piece.length / max_spacing - 1e-12));
        const double step = piece.length / static_cast<double> (std::max<std::size_t> (n, 1));
        const CenterlineSample start = line.samples_.back ();
        for (std::size_t k = 1; k <= std::max<std::size_t> (n, 1); ++k)
        {
            // advance from the piece start so rounding does not accumulate along the piece
            CenterlineSample next = advance_from (start, piece.curvature, step * static_cast<double> (k));
            line.samples_.push_back (next);
            line.curvature_.push_back (piece.curvature);
        }
    }
    return line;
}

Centerline Centerline::straight (double length, double max_spacing, CenterlineSample origin)
{
    const CenterlinePiece piece{length, 0.0};
    return from_pieces (std::span (&piece, 1), max_spacing, origin);
}

Centerline Centerline::arc (double radius, double angle, double max_spacing, CenterlineSample origin)
{
    if (!(radius > 0.0) || angle == 0.0)
        throw PreconditionError ("Centerline::arc: radius must be positive and angle non-zero");
    const CenterlinePiece piece{radius * std::abs (angle), angle > 0.0 ? 1.0 / radius : -1.0 / radius};
    return from_pieces (std::span (&piece, 1), max_spacing, origin);
}

Centerline Centerline::from_waypoints (std::span<const Eigen::Vector2d> points, double max_spacing)
{
    if (points.size () < 2)
        throw PreconditionError ("Centerline: at least two waypoints required");
    Centerline line;
    line.max_spacing_ = max_spacing;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < points.size (); ++i)
    {
        const Eigen::Vector2d d = points[i + 1] - points[i];
        const double len = d.norm ();
        if (!(len > 0.0))
            throw PreconditionError ("Centerline: consecutive waypoints coincide at index " + std::to_string (i));
        const double heading = std::atan2 (d.y (), d.x ());
        const auto n = std::max<std::size_t> (1, static_cast<std::size_t> (std::ceil (len / max_spacing - 1e-12)));
        if (i == 0)
            line.samples_.push_back ({points[0].x (), points[0].y (), 0.0, heading});
        else
            line.samples_.back ().heading = heading;
        for (std::size_t k = 1; k <= n; ++k)
        {
            const double f = static_cast<double> (k) / static_cast<double> (n);
            const Eigen::Vector2d p = points[i] + f * d;
            line.samples_.push_back ({p.x (), p.y (), s + f * len, heading});
            line.curvature_.push_back (0.0);
        }
        s += len;
        line.samples_.back ().s = s;
    }
    return line;
}

CenterlineSample Centerline::advance (std::size_t i, double ds) const
{
    return advance_from (samples_[i], curvature_[i], ds);
}

CenterlineSample Centerline::pose_at (double s) const
{
    s = std::clamp (s, 0.0, total_length ());
    auto it = std::upper_bound (samples_.begin (), samples_.end (), s,
                                [] (double v, const CenterlineSample &smp) { return v < smp.s; });
    auto i = static_cast<std::size_t> (std::distance (samples_.begin (), it));
    i = std::min (i == 0 ? 0 : i - 1, curvature_.size () - 1);
    return advance (i, s - samples_[i].s);
}

Eigen::Vector2d frenet_to_cartesian (FrenetPose pose, const Centerline &line)
{
    constexpr double kTol = 1e-9;
    if (!(pose.s >= -kTol && pose.s <= line.total_length () + kTol))
        throw DomainError ("frenet_to_cartesian: s = " + std::to_string (pose.s) + " outside [0, " +
                           std::to_string (line.total_length ()) + "]");
    const CenterlineSample c = line.pose_at (pose.s);
    return {c.x - pose.l * std::sin (c.heading), c.y + pose.l * std::cos (c.heading)};
}

FrenetProjection cartesian_to_frenet (double x, double y, const Centerline &line)
{
    const Eigen::Vector2d p (x, y);
    const auto &smp = line.samples ();
    FrenetProjection best;
    double best_d = std::numeric_limits<double>::infinity ();
    for (std::size_t i = 0; i + 1 < smp.size (); ++i)
    {
        const Eigen::Vector2d start (smp[i].x, smp[i].y);
        const double len = smp[i + 1].s - smp[i].s;
        const double kappa = line.segment_curvature (i);
        double ds = 0.0;
        if (std::abs (kappa) < 1e-12)
        {
            const Eigen::Vector2d u (std::cos (smp[i].heading), std::sin (smp[i].heading));
            ds = (p - start).dot (u);
        }
        else
        {
            const Eigen::Vector2d n (-std::sin (smp[i].heading), std::cos (smp[i].heading));
            const Eigen::Vector2d center = start + n / kappa;
            const Eigen::Vector2d w0 = start - center, w = p - center;
            ds = std::atan2 (cross (w0, w), w0.dot (w)) / kappa;
        }
        ds = std::clamp (ds, 0.0, len);
        const CenterlineSample foot = line.advance (i, ds);
        const Eigen::Vector2d q (foot.x, foot.y);
        const double d = (p - q).norm ();
        const double s = smp[i].s + ds;
        if (d < best_d - 1e-9)
        {
            best_d = d;
            const Eigen::Vector2d nf (-std::sin (foot.heading), std::cos (foot.heading));
            best.pose = {s, (p - q).dot (nf)};
            best.ambiguous = false;
        }
        else if (std::abs (d - best_d) <= 1e-9 && s - best.pose.s > 1e-6)
        {
            best.ambiguous = true;
        }
    }
    return best;
}

ObstacleTrajectory::ObstacleTrajectory (std::vector<ObstacleState> states, double length, double width)
    : states_ (std::move (states)), length_ (length), width_ (width)
{
    if (states_.empty ())
        throw PreconditionError ("ObstacleTrajectory: no states");
    if (!(length_ > 0.0) || !(width_ > 0.0))
        throw PreconditionError ("ObstacleTrajectory: footprint dimensions must be positive");
    for (std::size_t i = 1; i < states_.size (); ++i)
        if (!(states_[i].t > states_[i - 1].t))
            throw PreconditionError ("ObstacleTrajectory: timestamps must be strictly increasing (state " +
                                     std::to_string (i) + ")");
}

ObstacleTrajectory::PoseAt ObstacleTrajectory::pose_at (double t) const
{
    const auto &first = states_.front ();
    const auto &last = states_.back ();
    if (t <= first.t)
        return {{first.x, first.y, first.heading}, t < first.t};
    if (t >= last.t)
        return {{last.x, last.y, last.heading}, t > last.t};
    auto it = std::upper_bound (states_.begin (), states_.end (), t,
                                [] (double v, const ObstacleState &st) { return v < st.t; });
    const ObstacleState &b = *it;
    const ObstacleState &a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    return {{a.x + w * (b.x - a.x), a.y + w * (b.y - a.y), wrap_angle (a.heading + w * angle_diff (a.heading, b.heading))},
            false};
}

std::array<Eigen::Vector2d, 4> OrientedRect::corners () const
{
    const Eigen::Vector2d c (cx, cy);
    const Eigen::Vector2d u (std::cos (heading), std::sin (heading));
    const Eigen::Vector2d n (-u.y (), u.x ());
    return {c + half_length * u + half_width * n, c - half_length * u + half_width * n,
            c - half_length * u - half_width * n, c + half_length * u - half_width * n};
}

OrientedRect footprint_at (const ObstacleTrajectory &obs, double t, double inflation)
{
    const Pose2 p = obs.pose_at (t).pose;
    return {p.x, p.y, p.heading, 0.5 * obs.length () + inflation, 0.5 * obs.width () + inflation};
}

double point_rect_distance (const Eigen::Vector2d &p, const OrientedRect &r)
{
    const double dx = p.x () - r.cx, dy = p.y () - r.cy;
    const double c = std::cos (r.heading), s = std::sin (r.heading);
    const double lx = std::abs (c * dx + s * dy) - r.half_length;
    const double ly = std::abs (-s * dx + c * dy) - r.half_width;
    return std::hypot (std::max (lx, 0.0), std::max (ly, 0.0));
}

double rect_distance (const OrientedRect &a, const OrientedRect &b)
{
    const auto ca = a.corners (), cb = b.corners ();
    auto separated_along = [] (const Eigen::Vector2d &axis, const auto &p, const auto &q) {
        double pmin = std::numeric_limits<double>::infinity (), pmax = -pmin, qmin = pmin, qmax = -pmin;
        for (const auto &v : p)
        {
            pmin = std::min (pmin, v.dot (axis));
            pmax = std::max (pmax, v.dot (axis));
        }
        for (const auto &v : q)
        {
            qmin = std::min (qmin, v.dot (axis));
            qmax = std::max (qmax, v.dot (axis));
        }
        return pmax < qmin || qmax < pmin;
    };
    const std::array<Eigen::Vector2d, 4> axes{
        Eigen::Vector2d (std::cos (a.heading), std::sin (a.heading)),
        Eigen::Vector2d (-std::sin (a.heading), std::cos (a.heading)),
        Eigen::Vector2d (std::cos (b.heading), std::sin (b.heading)),
        Eigen::Vector2d (-std::sin (b.heading), std::cos (b.heading))};
    bool separated = false;
    for (const auto &axis : axes)
        separated = separated || separated_along (axis, ca, cb);
    if (!separated)
        return 0.0;
    double d = std::numeric_limits<double>::infinity ();
    for (const auto &v : ca)
        d = std::min (d, point_rect_distance (v, b));
    for (const auto &v : cb)
        d = std::min (d, point_rect_distance (v, a));
    return d;
}

namespace
{

bool inside (const Eigen::Vector2d &p, const OrientedRect &r)
{
    const double dx = p.x () - r.cx, dy = p.y () - r.cy;
    const double c = std::cos (r.heading), s = std::sin (r.heading);
    return std::abs (c * dx + s * dy) <= r.half_length && std::abs (-s * dx + c * dy) <= r.half_width;
}

} // namespace

bool point_free (const SltPoint &p, std::span<const ObstacleTrajectory> obstacles, const Centerline &line,
                 const VisibilityParams &vis)
{
    if (obstacles.empty ())
        return true;
    const Eigen::Vector2d xy = frenet_to_cartesian ({p.s, p.l}, line);
    for (const auto &obs : obstacles)
        if (inside (xy, footprint_at (obs, p.t, vis.inflation ())))
            return false;
    return true;
}

double point_clearance (const SltPoint &p, std::span<const ObstacleTrajectory> obstacles, const Centerline &line,
                        const VisibilityParams &vis)
{
    double d = std::numeric_limits<double>::infinity ();
    if (obstacles.empty ())
        return d;
    const Eigen::Vector2d xy = frenet_to_cartesian ({p.s, p.l}, line);
    for (const auto &obs : obstacles)
        d = std::min (d, point_rect_distance (xy, footprint_at (obs, p.t, vis.inflation ())));
    return d;
}

bool segment_clear (const SltPoint &a, const SltPoint &b, std::span<const ObstacleTrajectory> obstacles,
                    const Centerline &line, const VisibilityParams &vis)
{
    if (obstacles.empty ())
        return true;
    const double span_t = std::abs (b.t - a.t);
    const double span_sl = std::hypot (b.s - a.s, b.l - a.l);
    const double n = std::max ({1.0, std::ceil (span_t / vis.dt_check), std::ceil (span_sl / vis.ds_check)});
    const auto steps = static_cast<std::size_t> (n);
    for (std::size_t k = 0; k <= steps; ++k)
    {
        const double w = static_cast<double> (k) / n;
        const SltPoint q{a.s + w * (b.s - a.s), a.l + w * (b.l - a.l), a.t + w * (b.t - a.t)};
        if (!point_free (q, obstacles, line, vis))
            return false;
    }
    return true;
}

bool segment_visible (const SltPoint &a, const SltPoint &b, std::span<const ObstacleTrajectory> obstacles,
                      const Centerline &line, const VisibilityParams &vis)
{
    const bool degenerate = std::abs (b.s - a.s) < 1e-12 && std::abs (b.l - a.l) < 1e-12 && std::abs (b.t - a.t) < 1e-12;
    if (degenerate)
        return true;
    if (!(a.t < b.t))
        throw PreconditionError ("segment_visible: requires p1.t < p2.t");
    return segment_clear (a, b, obstacles, line, vis);
}

namespace
{

OrientedRect ego_rect (const PolynomialTrajectory &traj, double t, const Footprint &ego, double &last_heading)
{
    const Eigen::Vector2d p = traj.position (t);
    const Eigen::Vector2d v = traj.derivative (t, 1);
    if (v.norm () > 1e-9)
        last_heading = std::atan2 (v.y (), v.x ());
    return {p.x (), p.y (), last_heading, 0.5 * ego.length, 0.5 * ego.width};
}

double clearance_at (const PolynomialTrajectory &traj, std::span<const ObstacleTrajectory> obstacles,
                     const Footprint &ego, double t, double &last_heading)
{
    const OrientedRect me = ego_rect (traj, t, ego, last_heading);
    double d = std::numeric_limits<double>::infinity ();
    for (const auto &obs : obstacles)
        d = std::min (d, rect_distance (me, footprint_at (obs, t)));
    return d;
}

} // namespace

ObstacleDistance min_obstacle_distance (const PolynomialTrajectory &traj, std::span<const ObstacleTrajectory> obstacles,
                                        const Footprint &ego, double r_th, double dt)
{
    ObstacleDistance out;
    if (obstacles.empty ())
        return out;
    const double T = traj.duration ();
    const auto n = std::max<std::size_t> (1, static_cast<std::size_t> (std::ceil (T / dt - 1e-9)));
    const double h = T / static_cast<double> (n);
    double heading = 0.0;
    {
        const Eigen::Vector2d v0 = traj.derivative (0.0, 1);
        heading = std::atan2 (v0.y (), v0.x ());
    }
    double total_len = 0.0, close_len = 0.0;
    out.d_min = clearance_at (traj, obstacles, ego, 0.0, heading);
    for (std::size_t j = 0; j < n; ++j)
    {
        const double t0 = h * static_cast<double> (j), t1 = h * static_cast<double> (j + 1);
        const double tm = 0.5 * (t0 + t1);
        const double d_mid = clearance_at (traj, obstacles, ego, tm, heading);
        const double d_end = clearance_at (traj, obstacles, ego, t1, heading);
        out.d_min = std::min ({out.d_min, d_mid, d_end});
        // interval arc length, 3-point Gauss
        const double half = 0.5 * h;
        const double g = std::sqrt (0.6) * half;
        const double len = half * (5.0 / 9.0 * traj.derivative (tm - g, 1).norm () +
                                   8.0 / 9.0 * traj.derivative (tm, 1).norm () +
                                   5.0 / 9.0 * traj.derivative (tm + g, 1).norm ());
        total_len += len;
        if (d_mid < r_th)
            close_len += len;
    }
    out.close_ratio = total_len > 0.0 ? close_len / total_len : 0.0;
    return out;
}

} // namespace overtake
