#include <overtake/evaluator.hpp>

#include <chrono>
#include <cmath>
#include <sstream>

#include <overtake/errors.hpp>
#include <overtake/flatness.hpp>
#include <overtake/parallel.hpp>

namespace overtake
{

const char *to_string (Feasibility f) { return f == Feasibility::high ? "high" : "low"; }

void EvaluationSettings::validate () const
{
    vehicle.validate ();
    feasibility.validate ();
    if (!(r_th > 0.0))
        throw ValidationError ("evaluation.r_th", "must be positive");
    if (!(collision_dt > 0.0))
        throw ValidationError ("evaluation.collision_dt", "must be positive");
    if (!(steer_rate_dt > 0.0))
        throw ValidationError ("evaluation.steer_rate_dt", "must be positive");
    if (reach_steps < 1)
        throw ValidationError ("feasibility.n_rs", "must be at least 1");
    if (tube.taylor_order < 2)
        throw ValidationError ("feasibility.taylor_order", "must be at least 2");
}

CandidateReport candidate_metrics (const PolynomialTrajectory &traj, std::span<const ObstacleTrajectory> obstacles,
                                   const EvaluationSettings &settings, ReachTube *tube_out)
{
    CandidateReport rep;
    rep.duration = traj.duration ();
    rep.length = traj.arc_length ();
    rep.jerk = traj.jerk_integral ();
    const Footprint ego{settings.vehicle.length, settings.vehicle.width};
    const ObstacleDistance od = min_obstacle_distance (traj, obstacles, ego, settings.r_th, settings.collision_dt);
    rep.d_o_min = od.d_min;
    rep.close_ratio = od.close_ratio;
    rep.collision = od.d_min <= 0.0;
    try
    {
        const auto dense = recover_states_inputs (traj, settings.steer_rate_dt, settings.vehicle);
        double variation = 0.0;
        for (std::size_t i = 1; i < dense.size (); ++i)
            variation += std::abs (dense[i].input.steer - dense[i - 1].input.steer);
        rep.steer_rate = rep.duration > 0.0 ? variation / rep.duration : 0.0;

        const auto samples = recover_states_inputs_steps (traj, settings.reach_steps, settings.vehicle);
        const double r = rep.duration / static_cast<double> (settings.reach_steps);
        const auto inputs = mean_step_inputs (traj, settings.reach_steps, settings.vehicle);
        ReachTube tube =
            propagate_tube (samples, inputs, input_uncertainty (settings.vehicle), r, settings.vehicle, settings.tube);
        const FeasibilityResult feas = assess_feasibility (samples, tube, settings.containment_tol);
        rep.feasibility = feas.high ? Feasibility::high : Feasibility::low;
        rep.first_violation = feas.first_violation;
        rep.jrs = score_jrs (samples, tube, settings.feasibility);
        rep.valid = true;
        if (tube_out != nullptr)
            *tube_out = std::move (tube);
    }
    catch (const Error &e)
    {
        rep.valid = false;
        rep.note = e.what ();
    }
    return rep;
}

std::size_t select_trajectory (std::span<const CandidateReport> reports)
{
    if (reports.empty ())
        throw PreconditionError ("select_trajectory: no candidates");
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < reports.size (); ++i)
    {
        const CandidateReport &r = reports[i];
        if (!r.valid || r.collision || r.feasibility != Feasibility::high)
            continue;
        if (!best)
        {
            best = i;
            continue;
        }
        const CandidateReport &b = reports[*best];
        const bool better = r.jrs.total != b.jrs.total ? r.jrs.total < b.jrs.total
                            : r.jerk != b.jerk         ? r.jerk < b.jerk
                                                       : r.r_alpha < b.r_alpha;
        if (better)
            best = i;
    }
    if (best)
        return *best;

    std::size_t collisions = 0, low = 0, invalid = 0;
    std::ostringstream detail;
    for (const CandidateReport &r : reports)
    {
        detail << "\n  skeleton " << r.skeleton_id << " r_alpha " << r.r_alpha << ": ";
        if (!r.valid)
        {
            ++invalid;
            detail << "invalid (" << r.note << ")";
            continue;
        }
        if (r.collision)
        {
            ++collisions;
            detail << "collision";
        }
        if (r.feasibility != Feasibility::high)
        {
            ++low;
            detail << (r.collision ? ", " : "") << "low feasibility";
        }
    }
    const double n = static_cast<double> (reports.size ());
    std::ostringstream msg;
    msg << "no candidate is collision-free with high control feasibility (" << reports.size () << " candidates: "
        << 100.0 * static_cast<double> (collisions) / n << "% collision, " << 100.0 * static_cast<double> (low) / n
        << "% low feasibility, " << 100.0 * static_cast<double> (invalid) / n << "% invalid)" << detail.str ();
    throw NoFeasibleTrajectoryError (msg.str ());
}

std::vector<Candidate> evaluate_skeletons (std::span<const Skeleton> skeletons, std::span<const ObstacleTrajectory> obstacles,
                                           const PipelineSettings &settings)
{
    settings.evaluation.validate ();
    const std::size_t per = settings.r_grid.size ();
    std::vector<Candidate> out (skeletons.size () * per);
    parallel_for (out.size (), settings.threads, [&] (std::size_t i) {
        const std::size_t s = i / per, g = i % per;
        Candidate &c = out[i];
        c.report.skeleton_id = s;
        c.report.topo_id = s + 1;
        c.report.r_alpha = settings.r_grid[g];
        try
        {
            c.trajectory = fit_skeleton (skeletons[s], FitWeights::from_ratio (settings.r_grid[g]));
        }
        catch (const Error &e)
        {
            c.report.note = e.what ();
            return;
        }
        ReachTube tube;
        CandidateReport rep = candidate_metrics (*c.trajectory, obstacles, settings.evaluation,
                                                 settings.keep_tubes ? &tube : nullptr);
        rep.skeleton_id = c.report.skeleton_id;
        rep.topo_id = c.report.topo_id;
        rep.r_alpha = c.report.r_alpha;
        c.report = std::move (rep);
        if (settings.keep_tubes && c.report.valid)
            c.tube = std::move (tube);
    });
    return out;
}

PipelineResult run_pipeline (const StsProblem &problem, const PipelineSettings &settings)
{
    using clock = std::chrono::steady_clock;
    PipelineResult out;
    const auto t0 = clock::now ();
    const StGraph graph = build_graph (problem, settings.search);
    out.graph_nodes = graph.nodes.size ();
    out.graph_edges = graph.edges.size ();
    out.graph_link_edges = graph.link_edge_count ();
    out.skeletons = extract_distinct_skeletons (graph, problem, settings.cost, settings.search);
    const auto t1 = clock::now ();
    out.candidates = evaluate_skeletons (out.skeletons.skeletons, problem.obstacles, settings);
    std::vector<CandidateReport> reports;
    for (const Candidate &c : out.candidates)
        reports.push_back (c.report);
    if (reports.empty ())
    {
        out.selection_error = out.skeletons.diagnostic.empty () ? "no candidates" : out.skeletons.diagnostic;
    }
    else
    {
        try
        {
            out.selected = select_trajectory (reports);
        }
        catch (const NoFeasibleTrajectoryError &e)
        {
            out.selection_error = e.what ();
        }
    }
    const auto t2 = clock::now ();
    out.upper_ms = std::chrono::duration<double, std::milli> (t1 - t0).count ();
    out.lower_ms = std::chrono::duration<double, std::milli> (t2 - t1).count ();
    return out;
}

} // namespace overtake
