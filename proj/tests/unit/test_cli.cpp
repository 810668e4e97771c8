#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include <overtake/errors.hpp>

#include "commands.hpp"
#include "generators.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace overtake;
using namespace overtake::cli;

namespace
{

const char *kMinimal = R"({
  "centerline": {"type": "straight", "length": 100},
  "road": {"half_width": 3.6},
  "ego": {"s": 0, "l": -1.8, "v": 12},
  "goal": {"s": 40, "l": -1.8},
  "obstacles": []
})";

std::string field_of (const std::string &text)
{
    try
    {
        parse_scenario (text);
    }
    catch (const ValidationError &e)
    {
        return e.field ();
    }
    return "<accepted>";
}

std::string slurp (const fs::path &p)
{
    std::ifstream in (p);
    std::ostringstream ss;
    ss << in.rdbuf ();
    return ss.str ();
}

/// Fresh scratch directory removed on scope exit.
struct Scratch
{
    fs::path dir;
    explicit Scratch (const std::string &name) : dir (fs::temp_directory_path () / ("overtake_cli_" + name))
    {
        fs::remove_all (dir);
        fs::create_directories (dir);
    }
    ~Scratch () { fs::remove_all (dir); }
};

} // namespace

TEST_CASE ("minimal scenario parses with documented defaults")
{
    const Scenario sc = parse_scenario (kMinimal);
    CHECK (sc.line->total_length () == doctest::Approx (100.0));
    CHECK (sc.start.l == -1.8);
    CHECK (sc.start_speed == 12.0);
    CHECK (sc.obstacles.empty ());
    CHECK (sc.pipeline.r_grid.size () == 7);
    CHECK (sc.pipeline.search.ds == 5.0);
    CHECK (sc.pipeline.search.dl == 0.9);
    CHECK (sc.pipeline.search.num_skeletons == 3);
    CHECK (sc.pipeline.evaluation.reach_steps == 15);
    CHECK (sc.pipeline.evaluation.vehicle.wheelbase == 2.8);
    CHECK (sc.tracking.horizon == 50);
    const StsProblem p = sc.problem ();
    CHECK (p.line == &*sc.line);
    CHECK (p.goal.s == 40.0);
}

TEST_CASE ("scenario validation names the offending field")
{
    auto with = [] (const std::string &extra) {
        std::string text = kMinimal;
        text.insert (text.rfind ('}'), "," + extra);
        return text;
    };
    CHECK (field_of ("[1, 2]") == "<root>");
    CHECK (field_of (R"({"road": {"half_width": 3.6}})") == "centerline");
    CHECK (field_of (with (R"("bogus": 1)")) == "bogus");
    CHECK (field_of (with (R"("search": {"ds": "five"})")) == "search.ds");
    CHECK (field_of (with (R"("search": {"dss": 5})")) == "search.dss");
    CHECK (field_of (with (R"("fit": {"r_alpha": [0.1, -1]})")) == "fit.r_alpha[1]");
    CHECK (field_of (with (R"("fit": {"r_alpha": []})")) == "fit.r_alpha");
    std::string bad_obstacle = kMinimal;
    bad_obstacle.replace (bad_obstacle.find ("\"obstacles\": []"), 15,
                          R"("obstacles": [{"length": 4.3, "width": 1.9, "frenet": [{"t": 0, "s": 500, "l": 0}]}])");
    CHECK (field_of (bad_obstacle).find ("frenet[0].s") != std::string::npos);
    CHECK_THROWS_AS (parse_scenario ("{not json"), ValidationError);
    CHECK_THROWS_AS (load_scenario ("/nonexistent/scenario.json"), ValidationError);
}

TEST_CASE ("shipped scenarios validate")
{
    for (const char *f : {"s1.json", "s2.json", "s3.json", "free_road.json"})
    {
        std::ostringstream log;
        CHECK (cmd_validate (testsupport::scenario_path (f), log) == exit_ok);
        CHECK (log.str ().find ("is valid") != std::string::npos);
    }
}

TEST_CASE ("errors map to exit codes")
{
    std::ostringstream err;
    CHECK (guarded ("t", err, [] () -> int { throw ValidationError ("x", "bad"); }) == exit_validation);
    CHECK (guarded ("t", err, [] () -> int { throw NoFeasibleTrajectoryError ("none"); }) == exit_no_feasible);
    CHECK (guarded ("t", err, [] () -> int { throw EmptyGraphPathError ("none"); }) == exit_no_feasible);
    CHECK (guarded ("t", err, [] () -> int { throw DivergenceError (3, "far"); }) == exit_divergence);
    CHECK (guarded ("t", err, [] () -> int { throw std::runtime_error ("boom"); }) == exit_failure);
    CHECK (guarded ("t", err, [] { return exit_ok; }) == exit_ok);
    CHECK (err.str ().find ("[t] validation error: x: bad") != std::string::npos);
}

TEST_CASE ("sweep verdict self-test")
{
    std::ostringstream log;
    CHECK (cmd_sweep_self_test (log) == exit_ok);
    CHECK (log.str ().find ("injected non-monotone series rejected") != std::string::npos);
    const std::vector<double> up{1.0, 2.0};
    CHECK_FALSE (strictly_decreasing (up));
}

TEST_CASE ("plan, sweep and track on the single-vehicle scenario")
{
    Scratch scratch ("pipeline");
    RunOptions opts;
    opts.scenario = testsupport::scenario_path ("s1.json");
    opts.out = scratch.dir / "plan";
    opts.threads = 1;
    std::ostringstream log;
    REQUIRE (cmd_plan (opts, log) == exit_ok);
    CHECK (log.str ().find ("topology classes: 2") != std::string::npos);
    CHECK (log.str ().find ("runtime: upper") != std::string::npos);

    const std::string csv = slurp (opts.out / "candidates.csv");
    CHECK (csv.rfind (kCandidatesHeader, 0) == 0);
    std::string header = csv.substr (csv.find ('\n') + 1);
    header = header.substr (0, header.find ('\n'));
    std::string expected;
    for (const char *c : candidate_columns ())
        expected += (expected.empty () ? "" : ",") + std::string (c);
    CHECK (header == expected);

    const auto selected = nlohmann::json::parse (slurp (opts.out / "selected.json"));
    CHECK (selected.at ("schema") == "overtake-selected v1");
    CHECK (selected.at ("candidates").size () == 14);
    CHECK_FALSE (selected.at ("selected").is_null ());

    // same seed, same files; a different thread count does not change them either
    RunOptions again = opts;
    again.out = scratch.dir / "plan2";
    again.threads = 3;
    REQUIRE (cmd_plan (again, log) == exit_ok);
    for (const char *f : {"skeletons.json", "candidates.csv", "selected.json"})
        CHECK (slurp (opts.out / f) == slurp (again.out / f));

    RunOptions sweep = opts;
    sweep.out = scratch.dir / "sweep";
    sweep.topo_id = 1;
    std::ostringstream slog;
    CHECK (cmd_sweep (sweep, std::nullopt, slog) == exit_ok);
    CHECK (slog.str ().find ("J_s strictly decreasing: yes") != std::string::npos);
    CHECK (slog.str ().find ("J_RS strictly decreasing: yes") != std::string::npos);
    const auto verdict = nlohmann::json::parse (slurp (sweep.out / "sweep_verdict.json"));
    CHECK (verdict.at ("J_RS_strictly_decreasing") == true);

    sweep.topo_id = 9;
    CHECK_THROWS_AS (cmd_sweep (sweep, std::nullopt, slog), ValidationError);
    sweep.topo_id = 1;
    CHECK_THROWS_AS (cmd_sweep (sweep, std::vector<double>{}, slog), ValidationError);

    std::ostringstream tlog;
    CHECK (cmd_track (scratch.dir / "sweep" / "selected.json", scratch.dir / "track", 1, tlog) == exit_ok);
    const auto summary = nlohmann::json::parse (slurp (scratch.dir / "track" / "tracking_summary.json"));
    CHECK (summary.at ("samples") == 7);
    CHECK (summary.at ("spearman_J_RS_E_l").get<double> () >= 0.8);
    CHECK (slurp (scratch.dir / "track" / "tracking.csv").rfind (kTrackingHeader, 0) == 0);

    CHECK_THROWS_AS (cmd_track (scratch.dir / "missing.json", scratch.dir / "track", 1, tlog), ValidationError);
}

TEST_CASE ("free road plans a single straight-ahead class")
{
    Scratch scratch ("free");
    RunOptions opts;
    opts.scenario = testsupport::scenario_path ("free_road.json");
    opts.out = scratch.dir;
    opts.seed = 7;
    std::ostringstream log;
    CHECK (cmd_plan (opts, log) == exit_ok);
    CHECK (log.str ().find ("topology classes: 1") != std::string::npos);
}
