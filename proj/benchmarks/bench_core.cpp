#include <filesystem>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <overtake/evaluator.hpp>
#include <overtake/flatness.hpp>
#include <overtake/reachset.hpp>
#include <overtake/sts_search.hpp>
#include <overtake/traj_fit.hpp>
#include <overtake/zonotope.hpp>

#ifdef OVERTAKE_BENCH_SCENARIOS
#include "scenario.hpp"
#endif

using namespace overtake;

namespace
{

/// Lane change skeleton: 40 m ahead, one lane to the left, at about 10 m/s.
Skeleton lane_change ()
{
    Skeleton sk;
    const double l[] = {0.0, 0.0, 1.8, 3.6, 3.6};
    for (int k = 0; k < 5; ++k)
    {
        SkeletonNode n;
        n.id = static_cast<std::size_t> (k);
        n.s = n.x = 10.0 * k;
        n.l = n.y = l[k];
        n.t = static_cast<double> (k);
        sk.nodes.push_back (n);
    }
    return sk;
}

void BM_ZonotopeContains (benchmark::State &state)
{
    const auto gens = static_cast<Eigen::Index> (state.range (0));
    std::mt19937_64 rng (1);
    std::uniform_real_distribution<double> u (-1.0, 1.0);
    const Eigen::MatrixXd G = Eigen::MatrixXd::NullaryExpr (4, gens, [&] { return u (rng); });
    const Zonotope z (Eigen::Vector4d::Zero (), G);
    const Eigen::Vector4d p (0.3, -0.2, 0.1, 0.05);
    for (auto _ : state)
        benchmark::DoNotOptimize (zonotope_contains (z, p));
}
BENCHMARK (BM_ZonotopeContains)->Arg (4)->Arg (8)->Arg (16)->Arg (32);

void BM_FitSkeleton (benchmark::State &state)
{
    const Skeleton sk = lane_change ();
    const FitWeights w = FitWeights::from_ratio (0.015);
    for (auto _ : state)
        benchmark::DoNotOptimize (fit_skeleton (sk, w));
}
BENCHMARK (BM_FitSkeleton);

void BM_PropagateTube (benchmark::State &state)
{
    const VehicleParams params;
    const auto steps = static_cast<std::size_t> (state.range (0));
    const PolynomialTrajectory traj = fit_skeleton (lane_change (), FitWeights::from_ratio (0.015));
    const auto samples = recover_states_inputs_steps (traj, steps, params);
    const auto inputs = mean_step_inputs (traj, steps, params);
    const double r = traj.duration () / static_cast<double> (steps);
    for (auto _ : state)
        benchmark::DoNotOptimize (propagate_tube (samples, inputs, input_uncertainty (params), r, params));
}
BENCHMARK (BM_PropagateTube)->Arg (15)->Arg (30)->Arg (60);

void BM_CandidateMetrics (benchmark::State &state)
{
    const PolynomialTrajectory traj = fit_skeleton (lane_change (), FitWeights::from_ratio (0.015));
    const std::vector<ObstacleTrajectory> obs{
        ObstacleTrajectory ({{0.0, 15.0, 0.0, 0.0}, {10.0, 65.0, 0.0, 0.0}}, 4.3, 1.9)};
    const EvaluationSettings settings;
    for (auto _ : state)
        benchmark::DoNotOptimize (candidate_metrics (traj, obs, settings));
}
BENCHMARK (BM_CandidateMetrics)->Unit (benchmark::kMillisecond);

#ifdef OVERTAKE_BENCH_SCENARIOS
const cli::Scenario &two_vehicle ()
{
    static const cli::Scenario sc =
        cli::load_scenario (std::filesystem::path (OVERTAKE_SCENARIO_DIR) / "s2.json");
    return sc;
}

void BM_BuildGraph (benchmark::State &state)
{
    const cli::Scenario &sc = two_vehicle ();
    const StsProblem p = sc.problem ();
    for (auto _ : state)
        benchmark::DoNotOptimize (build_graph (p, sc.pipeline.search));
}
BENCHMARK (BM_BuildGraph)->Unit (benchmark::kMillisecond);

void BM_PipelineTwoVehicle (benchmark::State &state)
{
    const cli::Scenario &sc = two_vehicle ();
    const StsProblem p = sc.problem ();
    PipelineSettings settings = sc.pipeline;
    settings.threads = static_cast<std::size_t> (state.range (0));
    for (auto _ : state)
        benchmark::DoNotOptimize (run_pipeline (p, settings));
}
BENCHMARK (BM_PipelineTwoVehicle)->Arg (1)->Unit (benchmark::kMillisecond);
#endif

} // namespace

BENCHMARK_MAIN ();
