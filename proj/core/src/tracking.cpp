#include <overtake/tracking.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace overtake
{

void PurePursuitConfig::validate () const
{
    if (!(lookahead_gain >= 0.0))
        throw ValidationError ("tracking.lookahead_gain", "must be non-negative");
    if (!(base_lookahead > 0.0))
        throw ValidationError ("tracking.base_lookahead", "must be positive");
    if (!(speed_gain > 0.0))
        throw ValidationError ("tracking.speed_gain", "must be positive");
    if (horizon < 1)
        throw ValidationError ("tracking.horizon", "must be at least 1");
    if (!(sim_step > 0.0))
        throw ValidationError ("tracking.sim_step", "must be positive");
    if (!(divergence_limit > 0.0))
        throw ValidationError ("tracking.divergence_limit", "must be positive");
}

PursuitPath::PursuitPath (const PolynomialTrajectory &traj, double spacing_dt)
{
    const double T = traj.duration ();
    const auto n = std::max<std::size_t> (1, static_cast<std::size_t> (std::ceil (T / spacing_dt - 1e-9)));
    for (std::size_t k = 0; k <= n; ++k)
    {
        const double t = k == n ? T : T * static_cast<double> (k) / static_cast<double> (n);
        points_.push_back (traj.position (t));
        arc_.push_back (k == 0 ? 0.0 : arc_.back () + (points_[k] - points_[k - 1]).norm ());
    }
    Eigen::Vector2d d = traj.derivative (T, 1);
    if (d.norm () < 1e-12)
        d = points_.back () - points_[points_.size () - 2];
    end_dir_ = d.norm () > 0.0 ? Eigen::Vector2d (d.normalized ()) : Eigen::Vector2d (1.0, 0.0);
}

std::size_t PursuitPath::project (double x, double y, std::size_t hint) const
{
    const Eigen::Vector2d p (x, y);
    std::size_t best = std::min (hint, points_.size () - 1);
    double best_d = (points_[best] - p).squaredNorm ();
    // walk forward while the distance keeps shrinking, then scan a short window for local bumps
    for (std::size_t i = best + 1; i < points_.size (); ++i)
    {
        const double d = (points_[i] - p).squaredNorm ();
        if (d <= best_d)
        {
            best_d = d;
            best = i;
        }
        else if (i > best + 50)
        {
            break;
        }
    }
    return best;
}

Eigen::Vector2d PursuitPath::ahead (std::size_t from, double distance) const
{
    const double target = arc_[from] + distance;
    if (target >= arc_.back ())
        return points_.back () + (target - arc_.back ()) * end_dir_;
    const auto it = std::lower_bound (arc_.begin () + static_cast<std::ptrdiff_t> (from), arc_.end (), target);
    return points_[static_cast<std::size_t> (it - arc_.begin ())];
}

PursuitCommand pure_pursuit_step (const VehicleState &state, double v_ref, const PursuitPath &path, std::size_t hint,
                                  const PurePursuitConfig &cfg, const VehicleParams &params, double a_ref)
{
    PursuitCommand out;
    out.projection = path.project (state.x, state.y, hint);
    out.track_end = path.at_end (out.projection);
    const double ld = cfg.lookahead (state.v);
    const Eigen::Vector2d target = path.ahead (out.projection, ld);
    const double alpha = angle_diff (state.theta, std::atan2 (target.y () - state.y, target.x () - state.x));
    const double steer = std::atan (2.0 * params.wheelbase * std::sin (alpha) / ld);
    out.input.steer = std::clamp (steer, -params.steer_max, params.steer_max);
    const double feedforward = cfg.accel_feedforward ? a_ref : 0.0;
    out.input.accel = std::clamp (feedforward + cfg.speed_gain * (v_ref - state.v), -params.a_max, params.a_max);
    return out;
}

std::vector<TrackingSample> simulate_tracking (const PolynomialTrajectory &traj, const PurePursuitConfig &cfg,
                                               const VehicleParams &params)
{
    cfg.validate ();
    const PursuitPath path (traj);
    const double T = traj.duration ();
    const auto steps = static_cast<std::size_t> (std::ceil (T / cfg.sim_step - 1e-9));
    const double h = T / static_cast<double> (steps);

    FlatSample start = flat_state_at (traj, 0.0, params.wheelbase);
    Eigen::Vector4d x = start.state.as_vector ();
    std::size_t hint = 0;
    std::vector<TrackingSample> log;
    log.reserve (steps + 1);
    for (std::size_t k = 0;; ++k)
    {
        const double t = h * static_cast<double> (k);
        const Eigen::Vector2d vel = traj.derivative (t, 1);
        const double v_ref = vel.norm ();
        const double a_ref = v_ref > 0.0 ? vel.dot (traj.derivative (t, 2)) / v_ref : 0.0;
        const VehicleState state = VehicleState::from_vector (x);
        const PursuitCommand cmd = pure_pursuit_step (state, v_ref, path, hint, cfg, params, a_ref);
        hint = cmd.projection;
        log.push_back ({t, state, cmd.input});
        const double err = (traj.position (t) - Eigen::Vector2d (state.x, state.y)).norm ();
        if (!(err <= cfg.divergence_limit))
            throw DivergenceError (k, "tracking: position error " + std::to_string (err) + " m at t = " +
                                          std::to_string (t) + " s exceeds the divergence limit");
        if (k == steps)
            break;
        x = rk4_step (x, cmd.input.as_vector (), params.wheelbase, h);
    }
    return log;
}

std::vector<std::size_t> evaluation_indices (std::size_t log_size, std::size_t n)
{
    std::vector<std::size_t> idx;
    if (n == 0 || n >= log_size)
    {
        idx.resize (log_size);
        std::iota (idx.begin (), idx.end (), std::size_t{0});
        return idx;
    }
    if (n == 1)
        return {log_size - 1};
    for (std::size_t i = 0; i < n; ++i)
        idx.push_back (static_cast<std::size_t> (std::llround (static_cast<double> (i) * static_cast<double> (log_size - 1) /
                                                                static_cast<double> (n - 1))));
    return idx;
}

TrackingMetrics tracking_metrics (std::span<const TrackingSample> log, const PolynomialTrajectory &traj,
                                  const VehicleParams &params, std::size_t n)
{
    return tracking_metrics (
        log, [&] (double t) { return flat_state_at (traj, t, params.wheelbase).state; }, params.wheelbase, n);
}

namespace
{

std::vector<double> average_ranks (std::span<const double> v)
{
    std::vector<std::size_t> order (v.size ());
    std::iota (order.begin (), order.end (), std::size_t{0});
    std::stable_sort (order.begin (), order.end (), [&] (std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank (v.size ());
    for (std::size_t i = 0; i < order.size ();)
    {
        std::size_t j = i;
        while (j + 1 < order.size () && v[order[j + 1]] == v[order[i]])
            ++j;
        const double r = 0.5 * static_cast<double> (i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            rank[order[k]] = r;
        i = j + 1;
    }
    return rank;
}

} // namespace

double rank_correlation (std::span<const double> a, std::span<const double> b)
{
    if (a.size () != b.size () || a.size () < 2)
        throw PreconditionError ("rank_correlation: need two equally long series of at least two values");
    const std::vector<double> ra = average_ranks (a), rb = average_ranks (b);
    const double n = static_cast<double> (a.size ());
    const double ma = std::accumulate (ra.begin (), ra.end (), 0.0) / n;
    const double mb = std::accumulate (rb.begin (), rb.end (), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size (); ++i)
    {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        return 0.0;
    return sab / std::sqrt (saa * sbb);
}

} // namespace overtake
