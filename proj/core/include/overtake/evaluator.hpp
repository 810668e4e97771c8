#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <overtake/geometry.hpp>
#include <overtake/polynomial.hpp>
#include <overtake/reachset.hpp>
#include <overtake/sts_search.hpp>
#include <overtake/traj_fit.hpp>

namespace overtake
{

enum class Feasibility
{
    high,
    low
};

const char *to_string (Feasibility f);

struct EvaluationSettings
{
    VehicleParams vehicle;
    double r_th = 0.1;             ///< closeness threshold for R_o, m
    double collision_dt = 0.01;    ///< footprint clearance sampling, s
    double steer_rate_dt = 0.01;   ///< flatness sampling for J_delta_dot, s
    std::size_t reach_steps = 15;  ///< N_RS
    FeasibilityWeights feasibility;
    TubeOptions tube;
    double containment_tol = 1e-6;

    void validate () const;
};

struct CandidateReport
{
    std::size_t skeleton_id = 0;
    std::size_t topo_id = 0;
    double r_alpha = 0.0;
    bool valid = false;    ///< false when fitting or evaluation failed; see `note`
    std::string note;
    bool collision = false;
    double d_o_min = 0.0;  ///< m
    double close_ratio = 0.0; ///< R_o
    double length = 0.0;   ///< m
    double duration = 0.0; ///< s
    double jerk = 0.0;     ///< J_s
    double steer_rate = 0.0; ///< J_delta_dot, rad/s
    JrsScore jrs;
    Feasibility feasibility = Feasibility::low;
    std::optional<std::size_t> first_violation;
};

/// All metrics of one trajectory. Evaluation failures are reported through `valid`/`note`.
CandidateReport candidate_metrics (const PolynomialTrajectory &traj, std::span<const ObstacleTrajectory> obstacles,
                                   const EvaluationSettings &settings, ReachTube *tube_out = nullptr);

/// Collision-free, high-feasibility candidate with the smallest J_RS (ties: J_s, then r_alpha).
/// Throws NoFeasibleTrajectoryError listing why each candidate failed.
std::size_t select_trajectory (std::span<const CandidateReport> reports);

struct PipelineSettings
{
    SearchParams search;
    CostWeights cost;
    std::vector<double> r_grid{0.0, 0.005, 0.01, 0.015, 0.025, 0.05, 0.1};
    EvaluationSettings evaluation;
    std::size_t threads = 0; ///< 0 = hardware concurrency
    bool keep_tubes = false;
};

struct Candidate
{
    CandidateReport report;
    std::optional<PolynomialTrajectory> trajectory;
    std::optional<ReachTube> tube;
};

struct PipelineResult
{
    std::size_t graph_nodes = 0;
    std::size_t graph_edges = 0;
    std::size_t graph_link_edges = 0;
    DistinctSkeletons skeletons;
    std::vector<Candidate> candidates; ///< skeleton-major, grid order within a skeleton
    std::optional<std::size_t> selected;
    std::string selection_error;
    double upper_ms = 0.0; ///< graph search and topology extraction
    double lower_ms = 0.0; ///< fitting and evaluation
};

/// Candidates for the given skeletons evaluated concurrently.
std::vector<Candidate> evaluate_skeletons (std::span<const Skeleton> skeletons, std::span<const ObstacleTrajectory> obstacles,
                                           const PipelineSettings &settings);

/// Search, topology extraction, candidate generation, evaluation and selection.
PipelineResult run_pipeline (const StsProblem &problem, const PipelineSettings &settings);

} // namespace overtake
