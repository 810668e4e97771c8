#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <overtake/evaluator.hpp>
#include <overtake/geometry.hpp>
#include <overtake/sts_search.hpp>
#include <overtake/tracking.hpp>

namespace overtake::cli
{

/// A fully populated planning scenario: world, ego task and every tunable.
struct Scenario
{
    std::string source; ///< file the scenario was read from, if any
    std::string name;
    std::optional<Centerline> line;
    RoadBounds road;
    FrenetPose start;
    double start_speed = 0.0;
    FrenetPose goal;
    std::optional<double> goal_t_min;
    std::optional<double> goal_t_max;
    std::vector<ObstacleTrajectory> obstacles;
    PipelineSettings pipeline;
    PurePursuitConfig tracking;

    /// Problem view referencing this scenario's storage.
    StsProblem problem () const;
};

/// Parses and validates scenario JSON text. Unknown keys are rejected; errors name the field.
Scenario parse_scenario (const std::string &text, const std::string &source = "");

/// Reads a scenario file. Throws ValidationError on any problem (missing file, bad JSON, schema).
Scenario load_scenario (const std::filesystem::path &path);

} // namespace overtake::cli
