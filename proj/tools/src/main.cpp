#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

int main (int argc, char **argv)
{
    using namespace overtake::cli;
    CLI::App app{"Two-layer overtaking trajectory planner"};
    app.require_subcommand (1);

    RunOptions plan_opts;
    std::size_t plan_threads = 0, plan_topo = 0;
    std::uint64_t plan_seed = 0;
    auto *plan = app.add_subcommand ("plan", "search skeletons, fit and evaluate candidates, select a trajectory");
    plan->add_option ("--scenario", plan_opts.scenario, "scenario JSON file")->required ();
    plan->add_option ("--out", plan_opts.out, "output directory");
    auto *plan_seed_opt = plan->add_option ("--seed", plan_seed, "override the scenario seed");
    auto *plan_threads_opt = plan->add_option ("--threads", plan_threads, "worker threads (0 = all cores)");
    plan->add_flag ("--dump-tubes", plan_opts.dump_tubes, "write reachable tubes as JSON");
    plan->add_option ("--topo-id", plan_topo, "accepted for symmetry with sweep; ignored");

    RunOptions sweep_opts;
    std::size_t sweep_threads = 0, sweep_topo = 1;
    std::uint64_t sweep_seed = 0;
    std::vector<double> grid;
    bool self_test = false;
    auto *sweep = app.add_subcommand ("sweep", "evaluate an r_alpha grid on one topology class");
    sweep->add_option ("--scenario", sweep_opts.scenario, "scenario JSON file");
    sweep->add_option ("--out", sweep_opts.out, "output directory");
    auto *sweep_seed_opt = sweep->add_option ("--seed", sweep_seed, "override the scenario seed");
    auto *sweep_threads_opt = sweep->add_option ("--threads", sweep_threads, "worker threads (0 = all cores)");
    sweep->add_option ("--topo-id", sweep_topo, "1-based topology class to sweep");
    auto *grid_opt = sweep->add_option ("--grid", grid, "r_alpha values (default: scenario grid)")->delimiter (',');
    sweep->add_flag ("--dump-tubes", sweep_opts.dump_tubes, "write reachable tubes as JSON");
    sweep->add_flag ("--self-test", self_test, "check the monotonicity verdicts on synthetic series and exit");

    std::string selected = "out/selected.json", track_out = "out";
    std::size_t track_threads = 0;
    auto *track = app.add_subcommand ("track", "closed-loop pure-pursuit tracking of selected and swept candidates");
    track->add_option ("--selected", selected, "selected.json written by plan or sweep");
    track->add_option ("--out", track_out, "output directory");
    auto *track_threads_opt = track->add_option ("--threads", track_threads, "worker threads (0 = all cores)");

    std::string validate_path;
    auto *validate = app.add_subcommand ("validate", "check a scenario file against the schema");
    validate->add_option ("--scenario", validate_path, "scenario JSON file")->required ();

    try
    {
        app.parse (argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit (e) == 0 ? 0 : exit_validation;
    }

    if (*plan)
    {
        if (*plan_seed_opt)
            plan_opts.seed = plan_seed;
        if (*plan_threads_opt)
            plan_opts.threads = plan_threads;
        return guarded ("plan", std::cerr, [&] { return cmd_plan (plan_opts, std::cout); });
    }
    if (*sweep)
    {
        if (self_test)
            return cmd_sweep_self_test (std::cout);
        if (sweep_opts.scenario.empty ())
        {
            std::cerr << "[sweep] --scenario is required\n";
            return exit_validation;
        }
        if (*sweep_seed_opt)
            sweep_opts.seed = sweep_seed;
        if (*sweep_threads_opt)
            sweep_opts.threads = sweep_threads;
        sweep_opts.topo_id = sweep_topo;
        const std::optional<std::vector<double>> g = *grid_opt ? std::optional (grid) : std::nullopt;
        return guarded ("sweep", std::cerr, [&] { return cmd_sweep (sweep_opts, g, std::cout); });
    }
    if (*track)
    {
        const std::optional<std::size_t> th = *track_threads_opt ? std::optional (track_threads) : std::nullopt;
        return guarded ("track", std::cerr, [&] { return cmd_track (selected, track_out, th, std::cout); });
    }
    return guarded ("validate", std::cerr, [&] { return cmd_validate (validate_path, std::cout); });
}
