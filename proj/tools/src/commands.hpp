#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <overtake/evaluator.hpp>

namespace overtake::cli
{

enum ExitCode : int
{
    exit_ok = 0,
    exit_failure = 1,
    exit_validation = 2,
    exit_no_feasible = 3,
    exit_divergence = 4
};

struct RunOptions
{
    std::filesystem::path scenario;
    std::filesystem::path out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> topo_id; ///< 1-based topology class used by sweep
    bool dump_tubes = false;
};

/// Column names of candidates.csv / sweep.csv, in order.
std::span<const char *const> candidate_columns ();
inline constexpr const char *kCandidatesHeader = "# overtake-candidates v1";
inline constexpr const char *kTrackingHeader = "# overtake-tracking v1";

/// Verdict on whether a metric series strictly decreases along the grid.
bool strictly_decreasing (std::span<const double> values);

int cmd_plan (const RunOptions &opts, std::ostream &log);
int cmd_sweep (const RunOptions &opts, const std::optional<std::vector<double>> &grid, std::ostream &log);
int cmd_sweep_self_test (std::ostream &log);
int cmd_track (const std::filesystem::path &selected, const std::filesystem::path &out, std::optional<std::size_t> threads,
               std::ostream &log);
int cmd_validate (const std::filesystem::path &scenario, std::ostream &log);

/// Runs `body` and maps planner errors to exit codes, printing a stage-tagged message.
template <class Body> int guarded (const char *stage, std::ostream &err, Body &&body);

} // namespace overtake::cli

#include <overtake/errors.hpp>

namespace overtake::cli
{

template <class Body> int guarded (const char *stage, std::ostream &err, Body &&body)
{
    try
    {
        return body ();
    }
    catch (const ValidationError &e)
    {
        err << "[" << stage << "] validation error: " << e.what () << "\n";
        return exit_validation;
    }
    catch (const NoFeasibleTrajectoryError &e)
    {
        err << "[" << stage << "] no feasible trajectory: " << e.what () << "\n";
        return exit_no_feasible;
    }
    catch (const EmptyGraphPathError &e)
    {
        err << "[" << stage << "] search failed: " << e.what () << "\n";
        return exit_no_feasible;
    }
    catch (const DivergenceError &e)
    {
        err << "[" << stage << "] tracking diverged: " << e.what () << "\n";
        return exit_divergence;
    }
    catch (const std::exception &e)
    {
        err << "[" << stage << "] error: " << e.what () << "\n";
        return exit_failure;
    }
}

} // namespace overtake::cli
