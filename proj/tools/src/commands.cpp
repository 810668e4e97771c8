#include "commands.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <overtake/parallel.hpp>
#include <overtake/tracking.hpp>

#include "scenario.hpp"

namespace overtake::cli
{

namespace
{

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::array<const char *, 17> kColumns{
    "skeleton_id", "topo_id", "r_alpha", "collision", "d_o_min", "R_o",    "len",         "T",    "J_s",
    "J_delta_dot", "J_p",     "J_v",     "J_theta",   "J_RS",    "feasibility", "valid", "note"};

std::string num (double v)
{
    if (std::isinf (v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf (buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_text (std::string s)
{
    for (char &c : s)
        if (c == '\n' || c == '\r')
            c = ' ';
    if (s.find_first_of (",\"") == std::string::npos)
        return s;
    std::string out = "\"";
    for (const char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

void write_file (const fs::path &path, const std::string &text)
{
    std::ofstream out (path, std::ios::binary);
    if (!out)
        throw std::runtime_error ("cannot write " + path.string ());
    out << text;
}

std::string candidates_csv (std::span<const Candidate> candidates)
{
    std::ostringstream os;
    os << kCandidatesHeader << "\n";
    for (std::size_t i = 0; i < kColumns.size (); ++i)
        os << (i ? "," : "") << kColumns[i];
    os << "\n";
    for (const Candidate &c : candidates)
    {
        const CandidateReport &r = c.report;
        os << r.skeleton_id << ',' << r.topo_id << ',' << num (r.r_alpha) << ',' << (r.collision ? 'Y' : 'N') << ','
           << num (r.d_o_min) << ',' << num (r.close_ratio) << ',' << num (r.length) << ',' << num (r.duration) << ','
           << num (r.jerk) << ',' << num (r.steer_rate) << ',' << num (r.jrs.position) << ',' << num (r.jrs.speed)
           << ',' << num (r.jrs.heading) << ',' << num (r.jrs.total) << ',' << to_string (r.feasibility) << ','
           << (r.valid ? "true" : "false") << ',' << csv_text (r.note) << "\n";
    }
    return os.str ();
}

json finite_or_null (double v) { return std::isfinite (v) ? json (v) : json (nullptr); }

json report_json (const CandidateReport &r)
{
    json j{{"skeleton_id", r.skeleton_id},
           {"topo_id", r.topo_id},
           {"r_alpha", r.r_alpha},
           {"valid", r.valid},
           {"collision", r.collision},
           {"d_o_min", finite_or_null (r.d_o_min)},
           {"R_o", r.close_ratio},
           {"len", r.length},
           {"T", r.duration},
           {"J_s", r.jerk},
           {"J_delta_dot", r.steer_rate},
           {"J_p", r.jrs.position},
           {"J_v", r.jrs.speed},
           {"J_theta", r.jrs.heading},
           {"J_RS", r.jrs.total},
           {"feasibility", to_string (r.feasibility)}};
    if (r.first_violation)
        j["first_violation"] = *r.first_violation;
    if (!r.note.empty ())
        j["note"] = r.note;
    return j;
}

json trajectory_json (const PolynomialTrajectory &t)
{
    json x = json::array (), y = json::array ();
    for (std::size_t i = 0; i < t.segment_count (); ++i)
    {
        x.push_back (t.x_coeffs (i));
        y.push_back (t.y_coeffs (i));
    }
    return {{"knots", std::vector<double> (t.knots ().begin (), t.knots ().end ())}, {"x", x}, {"y", y}};
}

PolynomialTrajectory trajectory_from_json (const json &j)
{
    std::vector<Quintic> x, y;
    for (const auto &c : j.at ("x"))
        x.push_back (c.get<Quintic> ());
    for (const auto &c : j.at ("y"))
        y.push_back (c.get<Quintic> ());
    return PolynomialTrajectory (j.at ("knots").get<std::vector<double>> (), std::move (x), std::move (y));
}

json vehicle_json (const VehicleParams &v)
{
    return {{"wheelbase", v.wheelbase}, {"length", v.length},   {"width", v.width},
            {"v_max", v.v_max},         {"a_max", v.a_max},     {"steer_max", v.steer_max},
            {"accel_uncertainty", v.accel_uncertainty}, {"steer_uncertainty", v.steer_uncertainty}};
}

json tracking_json (const PurePursuitConfig &p)
{
    return {{"lookahead_gain", p.lookahead_gain}, {"base_lookahead", p.base_lookahead}, {"speed_gain", p.speed_gain},
            {"horizon", p.horizon},               {"sim_step", p.sim_step},             {"divergence_limit", p.divergence_limit},
            {"accel_feedforward", p.accel_feedforward}};
}

json skeleton_json (const Skeleton &s, std::size_t topo_id)
{
    json nodes = json::array ();
    for (const SkeletonNode &n : s.nodes)
        nodes.push_back ({{"id", n.id},
                          {"s", n.s},
                          {"l", n.l},
                          {"t", n.t},
                          {"x", n.x},
                          {"y", n.y},
                          {"kind", n.kind == NodeKind::link ? "link" : "layer"}});
    return {{"topo_id", topo_id},
            {"cost", s.cost},
            {"terms",
             {{"J_T", s.terms.time},
              {"J_theta", s.terms.bending},
              {"J_len", s.terms.length},
              {"J_acc", s.terms.accel},
              {"J_obs", s.terms.obstacle}}},
            {"skipped_angles", s.skipped_angles},
            {"nodes", nodes}};
}

Scenario prepare (const RunOptions &opts)
{
    Scenario sc = load_scenario (opts.scenario);
    if (opts.seed)
        sc.pipeline.search.seed = *opts.seed;
    if (opts.threads)
        sc.pipeline.threads = *opts.threads;
    sc.pipeline.keep_tubes = opts.dump_tubes;
    return sc;
}

void dump_tubes (const fs::path &dir, std::span<const Candidate> candidates)
{
    fs::create_directories (dir);
    for (std::size_t i = 0; i < candidates.size (); ++i)
        if (candidates[i].tube)
            write_file (dir / ("topo" + std::to_string (candidates[i].report.topo_id) + "_cand" + std::to_string (i) +
                               ".json"),
                        tube_to_json (*candidates[i].tube) + "\n");
}

json selected_document (const Scenario &sc, std::span<const Candidate> candidates, std::optional<std::size_t> selected)
{
    json cands = json::array ();
    for (const Candidate &c : candidates)
    {
        json j = report_json (c.report);
        if (c.trajectory)
            j["trajectory"] = trajectory_json (*c.trajectory);
        cands.push_back (j);
    }
    json doc{{"schema", "overtake-selected v1"},
             {"scenario", sc.source},
             {"seed", sc.pipeline.search.seed},
             {"vehicle", vehicle_json (sc.pipeline.evaluation.vehicle)},
             {"tracking", tracking_json (sc.tracking)},
             {"feasibility_weights",
              {{"lambda1", sc.pipeline.evaluation.feasibility.lambda_p},
               {"lambda2", sc.pipeline.evaluation.feasibility.lambda_v},
               {"lambda3", sc.pipeline.evaluation.feasibility.lambda_theta},
               {"d_r", sc.pipeline.evaluation.feasibility.d_r},
               {"v_r", sc.pipeline.evaluation.feasibility.v_r},
               {"theta_r", sc.pipeline.evaluation.feasibility.theta_r}}},
             {"candidates", cands}};
    if (selected)
    {
        doc["selected_index"] = *selected;
        doc["selected"] = cands[*selected];
    }
    else
    {
        doc["selected_index"] = nullptr;
        doc["selected"] = nullptr;
    }
    return doc;
}

} // namespace

std::span<const char *const> candidate_columns () { return kColumns; }

bool strictly_decreasing (std::span<const double> values)
{
    for (std::size_t i = 1; i < values.size (); ++i)
        if (!(values[i] < values[i - 1]))
            return false;
    return true;
}

int cmd_plan (const RunOptions &opts, std::ostream &log)
{
    const Scenario sc = prepare (opts);
    const PipelineResult res = run_pipeline (sc.problem (), sc.pipeline);
    fs::create_directories (opts.out);

    json skels = json::array ();
    for (std::size_t i = 0; i < res.skeletons.skeletons.size (); ++i)
        skels.push_back (skeleton_json (res.skeletons.skeletons[i], i + 1));
    const json skel_doc{{"scenario", sc.source},
                        {"seed", sc.pipeline.search.seed},
                        {"graph", {{"nodes", res.graph_nodes}, {"edges", res.graph_edges}, {"link_edges", res.graph_link_edges}}},
                        {"enumerated", res.skeletons.enumerated},
                        {"topo_classes", res.skeletons.skeletons.size ()},
                        {"skeletons", skels}};
    write_file (opts.out / "skeletons.json", skel_doc.dump (2) + "\n");
    write_file (opts.out / "candidates.csv", candidates_csv (res.candidates));
    write_file (opts.out / "selected.json", selected_document (sc, res.candidates, res.selected).dump (2) + "\n");
    if (opts.dump_tubes)
        dump_tubes (opts.out / "tubes", res.candidates);

    log << "topology classes: " << res.skeletons.skeletons.size () << " (" << res.skeletons.enumerated
        << " skeletons enumerated, graph " << res.graph_nodes << " nodes / " << res.graph_edges << " edges)\n";
    log << "candidates: " << res.candidates.size () << "\n";
    char timing[128];
    std::snprintf (timing, sizeof timing, "runtime: upper %.1f ms + lower %.1f ms\n", res.upper_ms, res.lower_ms);
    log << timing;
    if (!res.selected)
    {
        log << "[select] no feasible trajectory: " << res.selection_error << "\n";
        return exit_no_feasible;
    }
    const CandidateReport &r = res.candidates[*res.selected].report;
    log << "selected: topo " << r.topo_id << ", r_alpha " << num (r.r_alpha) << ", J_RS " << num (r.jrs.total)
        << ", J_s " << num (r.jerk) << ", d_o_min " << num (r.d_o_min) << "\n";
    return exit_ok;
}

int cmd_sweep (const RunOptions &opts, const std::optional<std::vector<double>> &grid, std::ostream &log)
{
    Scenario sc = prepare (opts);
    if (grid)
    {
        if (grid->empty ())
            throw ValidationError ("--grid", "must not be empty");
        for (const double r : *grid)
            if (!(r >= 0.0))
                throw ValidationError ("--grid", "r_alpha values must be non-negative");
        sc.pipeline.r_grid = *grid;
    }
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now ();
    const StsProblem problem = sc.problem ();
    const StGraph graph = build_graph (problem, sc.pipeline.search);
    const DistinctSkeletons skels = extract_distinct_skeletons (graph, problem, sc.pipeline.cost, sc.pipeline.search);
    const std::size_t topo = opts.topo_id.value_or (1);
    if (topo < 1 || topo > skels.skeletons.size ())
        throw ValidationError ("--topo-id", "scenario has " + std::to_string (skels.skeletons.size ()) +
                                                " topology classes, requested " + std::to_string (topo));
    const auto t1 = clock::now ();
    std::vector<Candidate> cands =
        evaluate_skeletons (std::span<const Skeleton> (&skels.skeletons[topo - 1], 1), problem.obstacles, sc.pipeline);
    for (Candidate &c : cands)
        c.report.topo_id = topo;
    const auto t2 = clock::now ();

    std::vector<double> js, jrs;
    for (const Candidate &c : cands)
    {
        js.push_back (c.report.jerk);
        jrs.push_back (c.report.jrs.total);
    }
    const bool js_dec = strictly_decreasing (js), jrs_dec = strictly_decreasing (jrs);
    std::vector<CandidateReport> reports;
    for (const Candidate &c : cands)
        reports.push_back (c.report);
    std::optional<std::size_t> selected;
    std::string selection_error;
    try
    {
        selected = select_trajectory (reports);
    }
    catch (const NoFeasibleTrajectoryError &e)
    {
        selection_error = e.what ();
    }

    fs::create_directories (opts.out);
    write_file (opts.out / "sweep.csv", candidates_csv (cands));
    const json verdict{{"topo_id", topo},
                       {"r_alpha", sc.pipeline.r_grid},
                       {"J_s_strictly_decreasing", js_dec},
                       {"J_RS_strictly_decreasing", jrs_dec},
                       {"selected_index", selected ? json (*selected) : json (nullptr)}};
    write_file (opts.out / "sweep_verdict.json", verdict.dump (2) + "\n");
    write_file (opts.out / "selected.json", selected_document (sc, cands, selected).dump (2) + "\n");
    if (opts.dump_tubes)
        dump_tubes (opts.out / "tubes", cands);

    log << "sweep over topo " << topo << " (" << cands.size () << " candidates)\n";
    log << "J_s strictly decreasing: " << (js_dec ? "yes" : "no") << "\n";
    log << "J_RS strictly decreasing: " << (jrs_dec ? "yes" : "no") << "\n";
    char timing[128];
    std::snprintf (timing, sizeof timing, "runtime: upper %.1f ms + lower %.1f ms\n",
                   std::chrono::duration<double, std::milli> (t1 - t0).count (),
                   std::chrono::duration<double, std::milli> (t2 - t1).count ());
    log << timing;
    if (!selected)
    {
        log << "[select] no feasible trajectory: " << selection_error << "\n";
        return exit_no_feasible;
    }
    log << "selected r_alpha " << num (cands[*selected].report.r_alpha) << "\n";
    return exit_ok;
}

int cmd_sweep_self_test (std::ostream &log)
{
    const std::array<double, 4> good{4.0, 3.0, 2.0, 1.0};
    const std::array<double, 4> bad{4.0, 2.0, 3.0, 1.0};
    const std::array<double, 3> flat{1.0, 1.0, 0.5};
    const bool ok = strictly_decreasing (good) && !strictly_decreasing (bad) && !strictly_decreasing (flat);
    log << "verdict self-test: monotone series " << (strictly_decreasing (good) ? "accepted" : "rejected")
        << ", injected non-monotone series " << (strictly_decreasing (bad) ? "accepted" : "rejected")
        << ", plateau " << (strictly_decreasing (flat) ? "accepted" : "rejected") << "\n";
    return ok ? exit_ok : exit_failure;
}

int cmd_track (const fs::path &selected, const fs::path &out, std::optional<std::size_t> threads, std::ostream &log)
{
    std::ifstream in (selected);
    if (!in)
        throw ValidationError ("<file>", "cannot open " + selected.string ());
    json doc;
    try
    {
        doc = json::parse (in);
    }
    catch (const json::parse_error &e)
    {
        throw ValidationError ("<file>", std::string ("invalid JSON: ") + e.what ());
    }
    if (doc.value ("schema", "") != "overtake-selected v1")
        throw ValidationError ("schema", "expected an overtake-selected v1 document");

    VehicleParams vehicle;
    {
        const json &v = doc.at ("vehicle");
        vehicle = {v.at ("wheelbase"), v.at ("length"), v.at ("width"), v.at ("v_max"), v.at ("a_max"),
                   v.at ("steer_max"), v.at ("accel_uncertainty"), v.at ("steer_uncertainty")};
        vehicle.validate ();
    }
    PurePursuitConfig cfg;
    {
        const json &t = doc.at ("tracking");
        cfg.lookahead_gain = t.at ("lookahead_gain");
        cfg.base_lookahead = t.at ("base_lookahead");
        cfg.speed_gain = t.at ("speed_gain");
        cfg.horizon = t.at ("horizon");
        cfg.sim_step = t.at ("sim_step");
        cfg.divergence_limit = t.at ("divergence_limit");
        cfg.accel_feedforward = t.value ("accel_feedforward", true);
        cfg.validate ();
    }

    struct Row
    {
        std::string label;
        std::size_t topo_id = 0;
        double r_alpha = 0.0;
        double jrs = 0.0;
        std::optional<PolynomialTrajectory> traj;
        TrackingMetrics metrics;
        std::string status = "ok";
    };
    std::vector<Row> rows;
    const json &cands = doc.at ("candidates");
    const bool has_selected = !doc.at ("selected_index").is_null ();
    if (has_selected)
    {
        const json &s = doc.at ("selected");
        rows.push_back ({"selected", s.at ("topo_id"), s.at ("r_alpha"), s.at ("J_RS"), trajectory_from_json (s.at ("trajectory")), {}, "ok"});
    }
    for (std::size_t i = 0; i < cands.size (); ++i)
    {
        const json &c = cands[i];
        Row row{"candidate" + std::to_string (i), c.at ("topo_id"), c.at ("r_alpha"), c.at ("J_RS"), std::nullopt, {}, "ok"};
        if (c.contains ("trajectory") && c.at ("valid").get<bool> ())
            row.traj = trajectory_from_json (c.at ("trajectory"));
        else
            row.status = "invalid";
        rows.push_back (std::move (row));
    }

    parallel_for (rows.size (), threads.value_or (0), [&] (std::size_t i) {
        Row &row = rows[i];
        if (!row.traj)
            return;
        try
        {
            const auto trace = simulate_tracking (*row.traj, cfg, vehicle);
            row.metrics = tracking_metrics (trace, *row.traj, vehicle, cfg.horizon);
        }
        catch (const DivergenceError &)
        {
            row.status = "diverged";
        }
        catch (const Error &)
        {
            row.status = "error";
        }
    });

    std::ostringstream csv;
    csv << kTrackingHeader << "\nlabel,topo_id,r_alpha,J_RS,E_l,E_p,E_theta,omega_m,status\n";
    for (const Row &r : rows)
        csv << r.label << ',' << r.topo_id << ',' << num (r.r_alpha) << ',' << num (r.jrs) << ','
            << num (r.metrics.lateral) << ',' << num (r.metrics.position) << ',' << num (r.metrics.heading) << ','
            << num (r.metrics.yaw_rate) << ',' << r.status << "\n";

    // rank correlation over the sweep that contains the selected trajectory (or the first class)
    const std::size_t topo = has_selected ? rows.front ().topo_id : (rows.empty () ? 0 : rows.front ().topo_id);
    std::vector<double> jrs, el;
    for (const Row &r : rows)
        if (r.label != "selected" && r.topo_id == topo && r.status == "ok")
        {
            jrs.push_back (r.jrs);
            el.push_back (r.metrics.lateral);
        }
    json summary{{"topo_id", topo}, {"samples", jrs.size ()}};
    if (jrs.size () >= 2)
    {
        const double rho = rank_correlation (jrs, el);
        summary["spearman_J_RS_E_l"] = rho;
        log << "rank correlation J_RS vs E_l (topo " << topo << ", " << jrs.size () << " candidates): " << num (rho) << "\n";
    }
    else
    {
        summary["spearman_J_RS_E_l"] = nullptr;
    }
    fs::create_directories (out);
    write_file (out / "tracking.csv", csv.str ());
    write_file (out / "tracking_summary.json", summary.dump (2) + "\n");

    std::size_t diverged = 0;
    for (const Row &r : rows)
        diverged += r.status == "diverged";
    log << "tracked " << rows.size () << " trajectories, " << diverged << " diverged\n";
    if (has_selected)
    {
        const Row &s = rows.front ();
        log << "selected: E_l " << num (s.metrics.lateral) << " m, E_p " << num (s.metrics.position) << " m, E_theta "
            << num (s.metrics.heading) << " rad, omega_m " << num (s.metrics.yaw_rate) << " rad/s\n";
        if (s.status == "diverged")
            return exit_divergence;
    }
    return exit_ok;
}

int cmd_validate (const fs::path &scenario, std::ostream &log)
{
    const Scenario sc = load_scenario (scenario);
    log << "scenario " << (sc.name.empty () ? scenario.string () : sc.name) << " is valid: centerline "
        << num (sc.line->total_length ()) << " m, " << sc.obstacles.size () << " obstacles, "
        << sc.pipeline.r_grid.size () << " r_alpha values, seed " << sc.pipeline.search.seed << "\n";
    return exit_ok;
}

} // namespace overtake::cli
