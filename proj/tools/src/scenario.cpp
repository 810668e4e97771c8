#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include <overtake/errors.hpp>
#include <overtake/math.hpp>

namespace overtake::cli
{

namespace
{

using nlohmann::json;

/// Strict view of one JSON object: every key must be read, anything left over is an error.
class Fields
{
  public:
    Fields (const json &j, std::string path) : j_ (j), path_ (std::move (path))
    {
        if (!j_.is_object ())
            throw ValidationError (path_.empty () ? "<root>" : path_, "expected an object");
    }

    std::string at (const std::string &key) const { return path_.empty () ? key : path_ + "." + key; }
    const std::string &path () const { return path_; }
    bool has (const std::string &key) const { return j_.contains (key); }

    const json &get (const std::string &key)
    {
        seen_.insert (key);
        if (!j_.contains (key))
            throw ValidationError (at (key), "required field is missing");
        return j_.at (key);
    }

    double number (const std::string &key)
    {
        const json &v = get (key);
        if (!v.is_number ())
            throw ValidationError (at (key), "expected a number");
        const double d = v.get<double> ();
        if (!std::isfinite (d))
            throw ValidationError (at (key), "must be finite");
        return d;
    }

    void number (const std::string &key, double &out)
    {
        if (has (key))
            out = number (key);
    }

    void count (const std::string &key, std::size_t &out)
    {
        if (!has (key))
            return;
        const json &v = get (key);
        if (!v.is_number_integer () || v.get<long long> () < 0)
            throw ValidationError (at (key), "expected a non-negative integer");
        out = v.get<std::size_t> ();
    }

    void flag (const std::string &key, bool &out)
    {
        if (!has (key))
            return;
        const json &v = get (key);
        if (!v.is_boolean ())
            throw ValidationError (at (key), "expected true or false");
        out = v.get<bool> ();
    }

    std::string text (const std::string &key)
    {
        const json &v = get (key);
        if (!v.is_string ())
            throw ValidationError (at (key), "expected a string");
        return v.get<std::string> ();
    }

    Fields object (const std::string &key) { return Fields (get (key), at (key)); }

    const json &array (const std::string &key)
    {
        const json &v = get (key);
        if (!v.is_array ())
            throw ValidationError (at (key), "expected an array");
        return v;
    }

    void finish () const
    {
        for (const auto &item : j_.items ())
            if (!seen_.count (item.key ()))
                throw ValidationError (at (item.key ()), "unknown field");
    }

  private:
    const json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

Centerline parse_centerline (Fields f)
{
    const std::string type = f.text ("type");
    double spacing = 0.5;
    f.number ("max_spacing", spacing);
    if (!(spacing > 0.0))
        throw ValidationError (f.at ("max_spacing"), "must be positive");
    CenterlineSample origin;
    if (f.has ("origin"))
    {
        Fields o = f.object ("origin");
        o.number ("x", origin.x);
        o.number ("y", origin.y);
        o.number ("heading", origin.heading);
        o.finish ();
    }
    std::optional<Centerline> line;
    if (type == "straight")
    {
        const double length = f.number ("length");
        if (!(length > 0.0))
            throw ValidationError (f.at ("length"), "must be positive");
        line = Centerline::straight (length, spacing, origin);
    }
    else if (type == "arc")
    {
        const double radius = f.number ("radius");
        const double angle = f.number ("angle");
        if (!(radius > 0.0))
            throw ValidationError (f.at ("radius"), "must be positive");
        if (angle == 0.0)
            throw ValidationError (f.at ("angle"), "must be non-zero");
        line = Centerline::arc (radius, angle, spacing, origin);
    }
    else if (type == "waypoints")
    {
        const json &pts = f.array ("points");
        std::vector<Eigen::Vector2d> points;
        for (std::size_t i = 0; i < pts.size (); ++i)
        {
            if (!pts[i].is_array () || pts[i].size () != 2 || !pts[i][0].is_number () || !pts[i][1].is_number ())
                throw ValidationError (f.at ("points[" + std::to_string (i) + "]"), "expected [x, y]");
            points.emplace_back (pts[i][0].get<double> (), pts[i][1].get<double> ());
        }
        if (points.size () < 2)
            throw ValidationError (f.at ("points"), "need at least two points");
        try
        {
            line = Centerline::from_waypoints (points, spacing);
        }
        catch (const Error &e)
        {
            throw ValidationError (f.at ("points"), e.what ());
        }
    }
    else
    {
        throw ValidationError (f.at ("type"), "expected \"straight\", \"arc\" or \"waypoints\"");
    }
    f.finish ();
    return *line;
}

ObstacleTrajectory parse_obstacle (Fields f, const Centerline &line)
{
    const std::string where = f.path ();
    double length = 4.3, width = 1.9;
    f.number ("length", length);
    f.number ("width", width);
    const bool cartesian = f.has ("states"), frenet = f.has ("frenet");
    if (cartesian == frenet)
        throw ValidationError (where, "give exactly one of \"states\" or \"frenet\"");
    std::vector<ObstacleState> states;
    if (cartesian)
    {
        const json &arr = f.array ("states");
        for (std::size_t i = 0; i < arr.size (); ++i)
        {
            Fields s (arr[i], f.at ("states[" + std::to_string (i) + "]"));
            ObstacleState st;
            st.t = s.number ("t");
            st.x = s.number ("x");
            st.y = s.number ("y");
            s.number ("heading", st.heading);
            s.finish ();
            states.push_back (st);
        }
    }
    else
    {
        const json &arr = f.array ("frenet");
        std::vector<FrenetPose> poses;
        for (std::size_t i = 0; i < arr.size (); ++i)
        {
            Fields s (arr[i], f.at ("frenet[" + std::to_string (i) + "]"));
            ObstacleState st;
            st.t = s.number ("t");
            const FrenetPose p{s.number ("s"), s.number ("l")};
            s.finish ();
            if (p.s < 0.0 || p.s > line.total_length ())
                throw ValidationError (f.at ("frenet[" + std::to_string (i) + "].s"), "outside the centerline");
            const Eigen::Vector2d xy = frenet_to_cartesian (p, line);
            st.x = xy.x ();
            st.y = xy.y ();
            st.heading = line.pose_at (p.s).heading;
            states.push_back (st);
            poses.push_back (p);
        }
        // vehicles driving against the s direction face backwards
        for (std::size_t i = 0; i < states.size (); ++i)
        {
            const std::size_t a = i + 1 < states.size () ? i : (i > 0 ? i - 1 : i);
            const std::size_t b = a + 1 < states.size () ? a + 1 : a;
            if (b != a && poses[b].s < poses[a].s)
                states[i].heading = wrap_angle (states[i].heading + kPi);
        }
    }
    f.finish ();
    if (states.empty ())
        throw ValidationError (where, "needs at least one state");
    for (std::size_t i = 1; i < states.size (); ++i)
        if (!(states[i].t > states[i - 1].t))
            throw ValidationError (where,
                                   "timestamps must be strictly increasing (state " + std::to_string (i) + ")");
    try
    {
        return ObstacleTrajectory (std::move (states), length, width);
    }
    catch (const Error &e)
    {
        throw ValidationError (where, e.what ());
    }
}

void parse_vehicle (Fields f, VehicleParams &v)
{
    f.number ("wheelbase", v.wheelbase);
    f.number ("length", v.length);
    f.number ("width", v.width);
    f.number ("v_max", v.v_max);
    f.number ("a_max", v.a_max);
    f.number ("steer_max", v.steer_max);
    f.number ("accel_uncertainty", v.accel_uncertainty);
    f.number ("steer_uncertainty", v.steer_uncertainty);
    f.finish ();
    v.validate ();
}

void parse_search (Fields f, SearchParams &s)
{
    f.number ("ds", s.ds);
    f.number ("dl", s.dl);
    f.number ("dt", s.dt);
    f.count ("link_samples", s.link_samples);
    f.count ("num_skeletons", s.num_skeletons);
    f.count ("k_best", s.k_best);
    f.number ("window_factor", s.window_factor);
    f.number ("uvd_step", s.uvd_step);
    f.number ("margin", s.margin);
    f.finish ();
}

void parse_cost (Fields f, CostWeights &c)
{
    f.number ("c1", c.c_time);
    f.number ("c2", c.c_bending);
    f.number ("c3", c.c_length);
    f.number ("c4", c.c_accel);
    f.number ("c5", c.c_obstacle);
    f.number ("r_th", c.r_th);
    f.number ("obstacle_sample_step", c.obstacle_sample_step);
    f.finish ();
}

void parse_feasibility (Fields f, EvaluationSettings &e)
{
    f.number ("lambda1", e.feasibility.lambda_p);
    f.number ("lambda2", e.feasibility.lambda_v);
    f.number ("lambda3", e.feasibility.lambda_theta);
    f.number ("d_r", e.feasibility.d_r);
    f.number ("v_r", e.feasibility.v_r);
    f.number ("theta_r", e.feasibility.theta_r);
    f.count ("n_rs", e.reach_steps);
    if (f.has ("taylor_order"))
    {
        std::size_t order = 0;
        f.count ("taylor_order", order);
        e.tube.taylor_order = static_cast<int> (order);
    }
    f.count ("max_generators", e.tube.max_generators);
    f.flag ("lagrange_remainder", e.tube.lagrange_remainder);
    f.number ("containment_tol", e.containment_tol);
    f.finish ();
}

void parse_tracking (Fields f, PurePursuitConfig &p)
{
    f.number ("lookahead_gain", p.lookahead_gain);
    f.number ("base_lookahead", p.base_lookahead);
    f.number ("speed_gain", p.speed_gain);
    f.count ("horizon", p.horizon);
    f.number ("sim_step", p.sim_step);
    f.number ("divergence_limit", p.divergence_limit);
    f.flag ("accel_feedforward", p.accel_feedforward);
    f.finish ();
    p.validate ();
}

} // namespace

StsProblem Scenario::problem () const
{
    StsProblem p;
    p.line = &*line;
    p.road = road;
    p.obstacles = obstacles;
    p.start = start;
    p.goal = goal;
    p.goal_t_min = goal_t_min;
    p.goal_t_max = goal_t_max;
    p.vehicle = pipeline.evaluation.vehicle;
    return p;
}

Scenario parse_scenario (const std::string &text, const std::string &source)
{
    json root;
    try
    {
        root = json::parse (text);
    }
    catch (const json::parse_error &e)
    {
        throw ValidationError ("<root>", std::string ("invalid JSON: ") + e.what ());
    }
    if (!root.is_object ())
        throw ValidationError ("<root>", "expected an object");
    {
        std::string first, missing;
        for (const char *key : {"centerline", "road", "ego", "goal"})
            if (!root.contains (key))
            {
                if (first.empty ())
                    first = key;
                missing += missing.empty () ? key : std::string (", ") + key;
            }
        if (!missing.empty ())
            throw ValidationError (first, "missing required field (absent: " + missing + ")");
    }

    Fields f (root, "");
    Scenario sc;
    sc.source = source;
    if (f.has ("name"))
        sc.name = f.text ("name");
    if (f.has ("seed"))
    {
        const json &v = f.get ("seed");
        if (!v.is_number_unsigned () && !(v.is_number_integer () && v.get<long long> () >= 0))
            throw ValidationError ("seed", "expected a non-negative integer");
        sc.pipeline.search.seed = v.get<std::uint64_t> ();
    }
    sc.line = parse_centerline (f.object ("centerline"));

    {
        Fields r = f.object ("road");
        sc.road.half_width = r.number ("half_width");
        sc.road.s_min = 0.0;
        sc.road.s_max = sc.line->total_length ();
        r.number ("s_min", sc.road.s_min);
        r.number ("s_max", sc.road.s_max);
        r.finish ();
        if (!(sc.road.half_width > 0.0))
            throw ValidationError ("road.half_width", "must be positive");
        if (!(sc.road.s_min >= 0.0 && sc.road.s_max <= sc.line->total_length () + 1e-9 && sc.road.s_min < sc.road.s_max))
            throw ValidationError ("road.s_max", "road bounds must lie on the centerline");
    }

    if (f.has ("vehicle"))
        parse_vehicle (f.object ("vehicle"), sc.pipeline.evaluation.vehicle);
    const VehicleParams &veh = sc.pipeline.evaluation.vehicle;

    {
        Fields e = f.object ("ego");
        sc.start.s = e.number ("s");
        sc.start.l = e.number ("l");
        e.number ("v", sc.start_speed);
        e.finish ();
        if (sc.start_speed < 0.0 || sc.start_speed > veh.v_max)
            throw ValidationError ("ego.v", "must lie in [0, v_max]");
    }
    {
        Fields g = f.object ("goal");
        sc.goal.s = g.number ("s");
        sc.goal.l = g.number ("l");
        if (g.has ("t_min"))
            sc.goal_t_min = g.number ("t_min");
        if (g.has ("t_max"))
            sc.goal_t_max = g.number ("t_max");
        g.finish ();
        if (!(sc.goal.s > sc.start.s))
            throw ValidationError ("goal.s", "must lie ahead of the ego start");
        if (sc.goal_t_min && sc.goal_t_max && !(*sc.goal_t_max >= *sc.goal_t_min))
            throw ValidationError ("goal.t_max", "must not be smaller than goal.t_min");
    }
    for (const auto &[pose, name] : {std::pair{sc.start, "ego"}, std::pair{sc.goal, "goal"}})
    {
        if (pose.s < sc.road.s_min || pose.s > sc.road.s_max)
            throw ValidationError (std::string (name) + ".s", "outside the road");
        if (std::abs (pose.l) > sc.road.half_width)
            throw ValidationError (std::string (name) + ".l", "outside the road");
    }

    if (f.has ("obstacles"))
    {
        const json &arr = f.array ("obstacles");
        for (std::size_t i = 0; i < arr.size (); ++i)
            sc.obstacles.push_back (
                parse_obstacle (Fields (arr[i], "obstacles[" + std::to_string (i) + "]"), *sc.line));
    }
    if (f.has ("search"))
        parse_search (f.object ("search"), sc.pipeline.search);
    sc.pipeline.search.validate ();
    if (f.has ("cost_weights"))
        parse_cost (f.object ("cost_weights"), sc.pipeline.cost);
    sc.pipeline.cost.v_max = veh.v_max;
    sc.pipeline.cost.validate ();
    sc.pipeline.evaluation.r_th = sc.pipeline.cost.r_th;
    if (f.has ("fit"))
    {
        Fields fit = f.object ("fit");
        const json &grid = fit.array ("r_alpha");
        sc.pipeline.r_grid.clear ();
        for (std::size_t i = 0; i < grid.size (); ++i)
        {
            if (!grid[i].is_number () || !(grid[i].get<double> () >= 0.0))
                throw ValidationError ("fit.r_alpha[" + std::to_string (i) + "]", "expected a non-negative number");
            sc.pipeline.r_grid.push_back (grid[i].get<double> ());
        }
        if (sc.pipeline.r_grid.empty ())
            throw ValidationError ("fit.r_alpha", "must not be empty");
        fit.finish ();
    }
    if (f.has ("feasibility"))
        parse_feasibility (f.object ("feasibility"), sc.pipeline.evaluation);
    sc.pipeline.evaluation.validate ();
    if (f.has ("tracking"))
        parse_tracking (f.object ("tracking"), sc.tracking);
    f.finish ();
    return sc;
}

Scenario load_scenario (const std::filesystem::path &path)
{
    std::ifstream in (path);
    if (!in)
        throw ValidationError ("<file>", "cannot open " + path.string ());
    std::ostringstream buf;
    buf << in.rdbuf ();
    return parse_scenario (buf.str (), path.string ());
}

} // namespace overtake::cli
