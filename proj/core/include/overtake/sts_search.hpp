#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <overtake/geometry.hpp>
#include <overtake/vehicle.hpp>

namespace overtake
{

enum class NodeKind
{
    layer,
    link
};

/// Graph node in s-l-t space with its incoming (E1) and outgoing (E2) edge ids.
struct StNode
{
    double s = 0.0;
    double l = 0.0;
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
    NodeKind kind = NodeKind::layer;
    int layer = 0; ///< for link nodes: the layer they follow
    std::vector<std::size_t> incoming;
    std::vector<std::size_t> outgoing;

    SltPoint slt () const { return {s, l, t}; }
};

/// Direct edge {from, to} or bridged edge {from, link, to}.
struct Edge
{
    std::size_t from = 0;
    std::size_t to = 0;
    std::optional<std::size_t> link;
};

/// Node copy stored in a skeleton.
struct SkeletonNode
{
    std::size_t id = 0;
    double s = 0.0;
    double l = 0.0;
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
    NodeKind kind = NodeKind::layer;

    SltPoint slt () const { return {s, l, t}; }
    auto operator<=> (const SkeletonNode &) const = default;
};

struct CostWeights
{
    double c_time = 1.0;
    double c_bending = 1.0;
    double c_length = 1.0;
    double c_accel = 1.0;
    double c_obstacle = 1.0;
    double r_th = 0.1;   ///< proximity threshold, m
    double v_max = 15.0; ///< m/s
    double obstacle_sample_step = 0.5; ///< spacing of proximity samples along each segment, m

    void validate () const;
};

struct CostTerms
{
    double time = 0.0;     ///< J_T
    double bending = 0.0;  ///< J_theta
    double length = 0.0;   ///< J_len
    double accel = 0.0;    ///< J_acc
    double obstacle = 0.0; ///< J_obs
};

struct SkeletonCost
{
    double total = 0.0;
    CostTerms terms;
    std::size_t skipped_angles = 0; ///< bends at coincident nodes left out of J_theta
};

struct Skeleton
{
    std::vector<SkeletonNode> nodes;
    double cost = 0.0;
    CostTerms terms;
    std::size_t skipped_angles = 0;

    double arrival_time () const { return nodes.back ().t; }
};

/// Everything the upper layer needs to know about the world.
struct StsProblem
{
    const Centerline *line = nullptr;
    RoadBounds road;
    std::span<const ObstacleTrajectory> obstacles;
    FrenetPose start;
    FrenetPose goal;
    std::optional<double> goal_t_min; ///< arrival window; derived from the layer rule when absent
    std::optional<double> goal_t_max;
    VehicleParams vehicle;
};

struct SearchParams
{
    double ds = 5.0;             ///< longitudinal layer spacing, m
    double dl = 0.9;             ///< lateral sampling step, m
    double dt = 0.4;             ///< time sampling step, s
    std::size_t link_samples = 40; ///< N_s link nodes per layer gap
    std::size_t num_skeletons = 3; ///< N_p
    std::size_t k_best = 32;     ///< partial skeletons kept per node
    double window_factor = 2.0;  ///< layer i samples t in [t_i, window_factor * t_i]
    double uvd_step = 0.5;       ///< UVD sampling step, m
    double margin = 0.2;         ///< planning clearance added to the inflated footprints, m
    std::uint64_t seed = 1;

    void validate () const;
};

struct StGraph
{
    std::vector<StNode> nodes;
    std::vector<Edge> edges;
    std::size_t start = 0;
    std::vector<std::vector<std::size_t>> layers; ///< layer node ids; layers.back() is the goal set
    std::vector<std::vector<std::size_t>> links;  ///< link node ids per layer gap

    std::span<const std::size_t> goals () const { return layers.back (); }
    std::size_t link_edge_count () const;
};

/// Collision settings shared by graph construction, skeleton checks and UVD.
VisibilityParams planning_visibility (const StsProblem &problem, const SearchParams &params);

/// Euclidean distance in the s-l plane.
double st_dist (const SltPoint &a, const SltPoint &b);

/// p2 is reachable from p1 when the time gap allows covering dist at v_max.
bool is_reachable (const SltPoint &p1, const SltPoint &p2, double v_max);

/// Layered spatio-temporal graph; throws EmptyGraphPathError when no goal node is connected to the start.
StGraph build_graph (const StsProblem &problem, const SearchParams &params);

/// Proximity penalty over samples: sum(r_th - min(r_th, r_i)) / (M r_th).
double obstacle_proximity_cost (std::span<const double> distances, double r_th);

/// Five-term skeleton cost recomputed from scratch.
SkeletonCost skeleton_cost (std::span<const SkeletonNode> nodes, const CostWeights &weights, const StsProblem &problem,
                            const VisibilityParams &vis);

/// Uniform visibility deformation test; skeletons are matched at equal s progress.
bool uvd_equivalent (const Skeleton &a, const Skeleton &b, double ds, std::span<const ObstacleTrajectory> obstacles,
                     const Centerline &line, const VisibilityParams &vis);

/// All start-to-goal skeletons kept by the bounded k-best enumeration, cheapest first.
std::vector<Skeleton> enumerate_skeletons (const StGraph &graph, const StsProblem &problem, const CostWeights &weights,
                                           const SearchParams &params);

struct DistinctSkeletons
{
    std::vector<Skeleton> skeletons;
    std::size_t enumerated = 0;
    std::string diagnostic; ///< filled when nothing reaches the goal
};

/// Up to N_p cheapest skeletons that are pairwise UVD-distinct.
DistinctSkeletons extract_distinct_skeletons (const StGraph &graph, const StsProblem &problem,
                                              const CostWeights &weights, const SearchParams &params);

/// Orders skeletons by cost, then arrival time, then node ids.
bool skeleton_less (const Skeleton &a, const Skeleton &b);

} // namespace overtake
