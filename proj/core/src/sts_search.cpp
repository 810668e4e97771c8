#include <overtake/sts_search.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include <overtake/errors.hpp>
#include <overtake/math.hpp>

namespace overtake
{

void CostWeights::validate () const
{
    for (const auto &[v, name] : {std::pair{c_time, "cost_weights.c1"}, std::pair{c_bending, "cost_weights.c2"},
                                  std::pair{c_length, "cost_weights.c3"}, std::pair{c_accel, "cost_weights.c4"},
                                  std::pair{c_obstacle, "cost_weights.c5"}})
        if (!(v >= 0.0))
            throw ValidationError (name, "must be non-negative");
    if (!(r_th > 0.0))
        throw ValidationError ("cost_weights.r_th", "must be positive");
    if (!(v_max > 0.0))
        throw ValidationError ("cost_weights.v_max", "must be positive");
    if (!(obstacle_sample_step > 0.0))
        throw ValidationError ("cost_weights.obstacle_sample_step", "must be positive");
}

void SearchParams::validate () const
{
    if (!(ds > 0.0))
        throw ValidationError ("search.ds", "must be positive");
    if (!(dl > 0.0))
        throw ValidationError ("search.dl", "must be positive");
    if (!(dt > 0.0))
        throw ValidationError ("search.dt", "must be positive");
    if (num_skeletons == 0)
        throw ValidationError ("search.num_skeletons", "must be at least 1");
    if (k_best == 0)
        throw ValidationError ("search.k_best", "must be at least 1");
    if (!(window_factor >= 1.0))
        throw ValidationError ("search.window_factor", "must be >= 1");
    if (!(uvd_step > 0.0))
        throw ValidationError ("search.uvd_step", "must be positive");
    if (!(margin >= 0.0))
        throw ValidationError ("search.margin", "must be non-negative");
}

std::size_t StGraph::link_edge_count () const
{
    return static_cast<std::size_t> (std::count_if (edges.begin (), edges.end (), [] (const Edge &e) { return e.link.has_value (); }));
}

VisibilityParams planning_visibility (const StsProblem &problem, const SearchParams &params)
{
    VisibilityParams vis;
    vis.margin = params.margin;
    vis.ego_half_diagonal = problem.vehicle.half_diagonal ();
    return vis;
}

double st_dist (const SltPoint &a, const SltPoint &b) { return std::hypot (b.s - a.s, b.l - a.l); }

bool is_reachable (const SltPoint &p1, const SltPoint &p2, double v_max)
{
    return p2.t - p1.t >= st_dist (p1, p2) / v_max;
}

namespace
{

StNode make_node (const Centerline &line, double s, double l, double t, NodeKind kind, int layer)
{
    const Eigen::Vector2d xy = frenet_to_cartesian ({s, l}, line);
    StNode n;
    n.s = s;
    n.l = l;
    n.x = xy.x ();
    n.y = xy.y ();
    n.t = t;
    n.kind = kind;
    n.layer = layer;
    return n;
}

std::vector<double> time_samples (double lo, double hi, double dt)
{
    std::vector<double> out;
    for (std::size_t j = 0;; ++j)
    {
        const double t = lo + dt * static_cast<double> (j);
        if (t > hi + 1e-9)
            break;
        out.push_back (t);
    }
    return out;
}

} // namespace

StGraph build_graph (const StsProblem &problem, const SearchParams &params)
{
    params.validate ();
    if (problem.line == nullptr)
        throw PreconditionError ("build_graph: no centerline");
    const Centerline &line = *problem.line;
    const VisibilityParams vis = planning_visibility (problem, params);
    const double v_max = problem.vehicle.v_max;
    const double half_width = problem.road.half_width;
    const double lat_limit = half_width - 0.5 * problem.vehicle.width;
    const double s0 = problem.start.s, sg = problem.goal.s;

    auto inside_road = [&] (FrenetPose p) {
        return p.s >= problem.road.s_min && p.s <= problem.road.s_max && p.s >= 0.0 && p.s <= line.total_length () &&
               std::abs (p.l) <= half_width;
    };
    if (!inside_road (problem.start))
        throw PreconditionError ("build_graph: start outside road bounds");
    if (!inside_road (problem.goal))
        throw PreconditionError ("build_graph: goal outside road bounds");
    if (!(sg > s0))
        throw PreconditionError ("build_graph: goal must lie ahead of the start");

    const auto n_layers = static_cast<std::size_t> (std::ceil ((sg - s0) / params.ds - 1e-9));
    const auto k_lat = static_cast<int> (std::floor (lat_limit / params.dl + 1e-9));

    StGraph g;
    g.layers.resize (n_layers + 1);
    g.links.resize (n_layers);
    g.nodes.push_back (make_node (line, s0, problem.start.l, 0.0, NodeKind::layer, 0));
    g.start = 0;
    g.layers[0].push_back (0);

    std::vector<std::pair<double, double>> windows (n_layers + 1, {0.0, 0.0});
    for (std::size_t i = 1; i < n_layers; ++i)
    {
        const double s = s0 + params.ds * static_cast<double> (i);
        const double t_lo = (s - s0) / v_max;
        windows[i] = {t_lo, params.window_factor * t_lo};
        for (const double t : time_samples (t_lo, params.window_factor * t_lo, params.dt))
            for (int k = -k_lat; k <= k_lat; ++k)
            {
                const double l = params.dl * k;
                if (!point_free ({s, l, t}, problem.obstacles, line, vis))
                    continue;
                g.layers[i].push_back (g.nodes.size ());
                g.nodes.push_back (make_node (line, s, l, t, NodeKind::layer, static_cast<int> (i)));
            }
    }
    {
        const double t_lo = problem.goal_t_min.value_or ((sg - s0) / v_max);
        const double t_hi = problem.goal_t_max.value_or (params.window_factor * (sg - s0) / v_max);
        if (!(t_hi >= t_lo))
            throw PreconditionError ("build_graph: empty goal arrival window");
        windows[n_layers] = {t_lo, t_hi};
        for (const double t : time_samples (t_lo, t_hi, params.dt))
        {
            if (!point_free ({sg, problem.goal.l, t}, problem.obstacles, line, vis))
                continue;
            g.layers[n_layers].push_back (g.nodes.size ());
            g.nodes.push_back (make_node (line, sg, problem.goal.l, t, NodeKind::layer, static_cast<int> (n_layers)));
        }
    }

    std::mt19937_64 rng (params.seed);
    for (std::size_t i = 0; i < n_layers; ++i)
    {
        const double s_a = i == 0 ? s0 : s0 + params.ds * static_cast<double> (i);
        const double s_b = i + 1 == n_layers ? sg : s0 + params.ds * static_cast<double> (i + 1);
        std::uniform_real_distribution<double> ds_dist (s_a, s_b);
        std::uniform_real_distribution<double> dl_dist (-lat_limit, lat_limit);
        std::uniform_real_distribution<double> dt_dist (windows[i].first, windows[i + 1].second);
        std::size_t attempts = 0;
        while (g.links[i].size () < params.link_samples && attempts < 20 * params.link_samples)
        {
            ++attempts;
            const double s = ds_dist (rng), l = dl_dist (rng), t = dt_dist (rng);
            if (!(s > s_a && s < s_b))
                continue;
            if (!point_free ({s, l, t}, problem.obstacles, line, vis))
                continue;
            g.links[i].push_back (g.nodes.size ());
            g.nodes.push_back (make_node (line, s, l, t, NodeKind::link, static_cast<int> (i)));
        }
    }

    auto add_edge = [&] (std::size_t from, std::size_t to, std::optional<std::size_t> link) {
        const std::size_t id = g.edges.size ();
        g.edges.push_back ({from, to, link});
        g.nodes[from].outgoing.push_back (id);
        g.nodes[to].incoming.push_back (id);
        if (link)
        {
            g.nodes[*link].incoming.push_back (id);
            g.nodes[*link].outgoing.push_back (id);
        }
    };

    for (std::size_t i = 0; i < n_layers; ++i)
    {
        const auto &from_layer = g.layers[i];
        const auto &to_layer = g.layers[i + 1];
        const auto &links = g.links[i];
        // memoized link visibility: -1 unknown, 0 blocked/unreachable, 1 ok
        std::vector<std::int8_t> to_link (from_layer.size () * links.size (), -1);
        std::vector<std::int8_t> from_link (links.size () * to_layer.size (), -1);
        for (std::size_t a = 0; a < from_layer.size (); ++a)
        {
            const StNode &p1 = g.nodes[from_layer[a]];
            for (std::size_t b = 0; b < to_layer.size (); ++b)
            {
                const StNode &p2 = g.nodes[to_layer[b]];
                if (!(p2.t > p1.t) || !is_reachable (p1.slt (), p2.slt (), v_max))
                    continue;
                if (segment_visible (p1.slt (), p2.slt (), problem.obstacles, line, vis))
                {
                    add_edge (from_layer[a], to_layer[b], std::nullopt);
                    continue;
                }
                for (std::size_t c = 0; c < links.size (); ++c)
                {
                    const StNode &pl = g.nodes[links[c]];
                    if (!(pl.t > p1.t && pl.t < p2.t))
                        continue;
                    auto &first = to_link[a * links.size () + c];
                    if (first < 0)
                        first = is_reachable (p1.slt (), pl.slt (), v_max) &&
                                segment_visible (p1.slt (), pl.slt (), problem.obstacles, line, vis);
                    if (first == 0)
                        continue;
                    auto &second = from_link[c * to_layer.size () + b];
                    if (second < 0)
                        second = is_reachable (pl.slt (), p2.slt (), v_max) &&
                                 segment_visible (pl.slt (), p2.slt (), problem.obstacles, line, vis);
                    if (second == 0)
                        continue;
                    add_edge (from_layer[a], to_layer[b], links[c]);
                    break;
                }
            }
        }
    }

    // the goal set must be connected to the start
    std::vector<char> seen (g.nodes.size (), 0);
    std::queue<std::size_t> frontier;
    frontier.push (g.start);
    seen[g.start] = 1;
    while (!frontier.empty ())
    {
        const std::size_t n = frontier.front ();
        frontier.pop ();
        for (const std::size_t e : g.nodes[n].outgoing)
        {
            if (g.edges[e].from != n)
                continue;
            const std::size_t m = g.edges[e].to;
            if (!seen[m])
            {
                seen[m] = 1;
                frontier.push (m);
            }
        }
    }
    const bool connected = std::any_of (g.layers.back ().begin (), g.layers.back ().end (),
                                        [&] (std::size_t id) { return seen[id] != 0; });
    if (!connected)
        throw EmptyGraphPathError ("build_graph: no path from the start node to any goal node (" +
                                   std::to_string (g.layers.back ().size ()) + " goal nodes, " +
                                   std::to_string (g.edges.size ()) + " edges)");
    return g;
}

double obstacle_proximity_cost (std::span<const double> distances, double r_th)
{
    if (distances.empty ())
        return 0.0;
    double sum = 0.0;
    for (const double r : distances)
        sum += r_th - std::min (r_th, r);
    return sum / (static_cast<double> (distances.size ()) * r_th);
}

namespace
{

struct SegmentProximity
{
    double penalty_sum = 0.0;
    std::size_t count = 0;
};

SegmentProximity segment_proximity (const SltPoint &a, const SltPoint &b, const CostWeights &w, const StsProblem &problem,
                                    const VisibilityParams &vis)
{
    SegmentProximity out;
    const double len = st_dist (a, b);
    const auto n = std::max<std::size_t> (1, static_cast<std::size_t> (std::ceil (len / w.obstacle_sample_step - 1e-9)));
    out.count = n;
    if (problem.obstacles.empty ())
        return out;
    for (std::size_t j = 1; j <= n; ++j)
    {
        const double f = static_cast<double> (j) / static_cast<double> (n);
        const SltPoint q{a.s + f * (b.s - a.s), a.l + f * (b.l - a.l), a.t + f * (b.t - a.t)};
        const double r = point_clearance (q, problem.obstacles, *problem.line, vis);
        out.penalty_sum += w.r_th - std::min (w.r_th, r);
    }
    return out;
}

std::optional<double> bend_angle (const SltPoint &a, const SltPoint &b, const SltPoint &c)
{
    const double ux = b.s - a.s, uy = b.l - a.l, wx = c.s - b.s, wy = c.l - b.l;
    const double nu = std::hypot (ux, uy), nw = std::hypot (wx, wy);
    if (nu < 1e-12 || nw < 1e-12)
        return std::nullopt;
    return std::acos (std::clamp ((ux * wx + uy * wy) / (nu * nw), -1.0, 1.0));
}

double node_accel (const SltPoint &a, const SltPoint &b, const SltPoint &c)
{
    const double dt0 = b.t - a.t, dt1 = c.t - b.t;
    return 2.0 * (st_dist (b, c) / dt1 - st_dist (a, b) / dt0) / (dt0 + dt1);
}

double population_std (std::span<const double> values)
{
    if (values.empty ())
        return 0.0;
    double mean = 0.0;
    for (const double v : values)
        mean += v;
    mean /= static_cast<double> (values.size ());
    double var = 0.0;
    for (const double v : values)
        var += (v - mean) * (v - mean);
    return std::sqrt (var / static_cast<double> (values.size ()));
}

/// Running sums along a partial skeleton.
struct Aggregates
{
    double len_sum = 0.0;
    double theta_sum = 0.0;
    double obs_sum = 0.0;
    std::size_t obs_count = 0;
    std::size_t skipped = 0;
    double acc_sum = 0.0;
    double acc_sumsq = 0.0;
    std::size_t acc_n = 0;
};

SkeletonCost finish_cost (const Aggregates &agg, double accel_std, const SltPoint &first, const SltPoint &last,
                          const CostWeights &w)
{
    SkeletonCost out;
    const double d = st_dist (first, last);
    if (d > 1e-12)
    {
        const double t_ref = d / w.v_max;
        out.terms.time = (last.t - first.t) / t_ref;
        out.terms.length = agg.len_sum / d;
    }
    out.terms.bending = agg.theta_sum;
    out.terms.accel = accel_std;
    out.terms.obstacle = agg.obs_count > 0 ? agg.obs_sum / (static_cast<double> (agg.obs_count) * w.r_th) : 0.0;
    out.skipped_angles = agg.skipped;
    out.total = w.c_time * out.terms.time + w.c_bending * out.terms.bending + w.c_length * out.terms.length +
                w.c_accel * out.terms.accel + w.c_obstacle * out.terms.obstacle;
    return out;
}

/// Adds segment b -> c (with a the node before b, if any) to the running sums.
void extend (Aggregates &agg, const SltPoint *a, const SltPoint &b, const SltPoint &c, const SegmentProximity &prox,
             double *new_accel)
{
    agg.len_sum += st_dist (b, c);
    agg.obs_sum += prox.penalty_sum;
    agg.obs_count += prox.count;
    if (a != nullptr)
    {
        if (const auto theta = bend_angle (*a, b, c))
            agg.theta_sum += *theta / kPi;
        else
            ++agg.skipped;
        const double acc = node_accel (*a, b, c);
        agg.acc_sum += acc;
        agg.acc_sumsq += acc * acc;
        ++agg.acc_n;
        if (new_accel != nullptr)
            *new_accel = acc;
    }
}

double approx_std (const Aggregates &agg)
{
    if (agg.acc_n == 0)
        return 0.0;
    const double n = static_cast<double> (agg.acc_n);
    const double mean = agg.acc_sum / n;
    return std::sqrt (std::max (0.0, agg.acc_sumsq / n - mean * mean));
}

} // namespace

SkeletonCost skeleton_cost (std::span<const SkeletonNode> nodes, const CostWeights &weights, const StsProblem &problem,
                            const VisibilityParams &vis)
{
    if (nodes.size () < 2)
        throw PreconditionError ("skeleton_cost: skeleton needs at least two nodes");
    Aggregates agg;
    std::vector<double> accels;
    for (std::size_t i = 1; i < nodes.size (); ++i)
    {
        const SltPoint b = nodes[i - 1].slt (), c = nodes[i].slt ();
        const SltPoint a = i >= 2 ? nodes[i - 2].slt () : SltPoint{};
        double acc = 0.0;
        extend (agg, i >= 2 ? &a : nullptr, b, c, segment_proximity (b, c, weights, problem, vis), &acc);
        if (i >= 2)
            accels.push_back (acc);
    }
    return finish_cost (agg, population_std (accels), nodes.front ().slt (), nodes.back ().slt (), weights);
}

bool skeleton_less (const Skeleton &a, const Skeleton &b)
{
    if (a.cost != b.cost)
        return a.cost < b.cost;
    if (a.arrival_time () != b.arrival_time ())
        return a.arrival_time () < b.arrival_time ();
    return std::lexicographical_compare (a.nodes.begin (), a.nodes.end (), b.nodes.begin (), b.nodes.end (),
                                         [] (const SkeletonNode &x, const SkeletonNode &y) { return x.id < y.id; });
}

namespace
{

struct Partial
{
    std::size_t node = 0;
    std::int64_t parent = -1;
    Aggregates agg;
    std::vector<double> accels;
    double cost = 0.0;
    SkeletonCost exact;
};

struct EdgeSegments
{
    std::array<SegmentProximity, 2> prox;
    bool ready = false;
};

SkeletonNode to_skeleton_node (const StGraph &g, std::size_t id)
{
    const StNode &n = g.nodes[id];
    return {id, n.s, n.l, n.x, n.y, n.t, n.kind};
}

} // namespace

std::vector<Skeleton> enumerate_skeletons (const StGraph &graph, const StsProblem &problem, const CostWeights &weights,
                                           const SearchParams &params)
{
    weights.validate ();
    const VisibilityParams vis = planning_visibility (problem, params);
    const SltPoint origin = graph.nodes[graph.start].slt ();

    std::vector<Partial> arena;
    arena.reserve (graph.nodes.size () * 4);
    std::vector<std::vector<std::size_t>> kept (graph.nodes.size ());
    arena.push_back (Partial{graph.start, -1, {}, {}, 0.0, {}});
    kept[graph.start].push_back (0);

    std::vector<EdgeSegments> edge_cache (graph.edges.size ());
    auto edge_segments = [&] (std::size_t e) -> const EdgeSegments & {
        EdgeSegments &c = edge_cache[e];
        if (!c.ready)
        {
            const Edge &edge = graph.edges[e];
            const SltPoint from = graph.nodes[edge.from].slt (), to = graph.nodes[edge.to].slt ();
            if (edge.link)
            {
                const SltPoint mid = graph.nodes[*edge.link].slt ();
                c.prox[0] = segment_proximity (from, mid, weights, problem, vis);
                c.prox[1] = segment_proximity (mid, to, weights, problem, vis);
            }
            else
            {
                c.prox[0] = segment_proximity (from, to, weights, problem, vis);
            }
            c.ready = true;
        }
        return c;
    };

    struct Candidate
    {
        double cost;
        std::size_t order;
        std::size_t partial;
        std::size_t edge;
    };
    std::vector<Candidate> candidates;

    // Extends partial p along edge e; materializes the new partials when `commit` is set.
    auto grow = [&] (std::size_t p, std::size_t e, bool commit) -> double {
        const Edge &edge = graph.edges[e];
        const EdgeSegments &segs = edge_segments (e);
        std::array<std::size_t, 2> path{};
        std::size_t hops = 0;
        if (edge.link)
            path[hops++] = *edge.link;
        path[hops++] = edge.to;

        std::size_t cur = p;
        Aggregates agg = arena[p].agg;
        std::vector<double> accels;
        if (commit)
            accels = arena[p].accels;
        std::int64_t prev_node = arena[p].parent >= 0 ? static_cast<std::int64_t> (arena[static_cast<std::size_t> (arena[p].parent)].node) : -1;
        std::size_t here = arena[p].node;
        double cost = 0.0;
        for (std::size_t h = 0; h < hops; ++h)
        {
            const SltPoint b = graph.nodes[here].slt (), c = graph.nodes[path[h]].slt ();
            const SltPoint a = prev_node >= 0 ? graph.nodes[static_cast<std::size_t> (prev_node)].slt () : SltPoint{};
            double acc = 0.0;
            extend (agg, prev_node >= 0 ? &a : nullptr, b, c, segs.prox[h], &acc);
            if (commit && prev_node >= 0)
                accels.push_back (acc);
            if (commit)
            {
                Partial next;
                next.node = path[h];
                next.parent = static_cast<std::int64_t> (cur);
                next.agg = agg;
                next.accels = accels;
                next.exact = finish_cost (agg, population_std (accels), origin, c, weights);
                next.cost = next.exact.total;
                cur = arena.size ();
                arena.push_back (std::move (next));
            }
            else if (h + 1 == hops)
            {
                cost = finish_cost (agg, approx_std (agg), origin, c, weights).total;
            }
            prev_node = static_cast<std::int64_t> (here);
            here = path[h];
        }
        return commit ? static_cast<double> (cur) : cost;
    };

    for (std::size_t layer = 1; layer < graph.layers.size (); ++layer)
    {
        for (const std::size_t v : graph.layers[layer])
        {
            candidates.clear ();
            for (const std::size_t e : graph.nodes[v].incoming)
            {
                if (graph.edges[e].to != v)
                    continue;
                for (const std::size_t p : kept[graph.edges[e].from])
                    candidates.push_back ({grow (p, e, false), candidates.size (), p, e});
            }
            auto by_cost = [] (const Candidate &x, const Candidate &y) {
                return x.cost != y.cost ? x.cost < y.cost : x.order < y.order;
            };
            if (candidates.size () > params.k_best)
            {
                std::nth_element (candidates.begin (), candidates.begin () + static_cast<std::ptrdiff_t> (params.k_best),
                                  candidates.end (), by_cost);
                candidates.resize (params.k_best);
            }
            std::sort (candidates.begin (), candidates.end (), by_cost);
            for (const Candidate &c : candidates)
                kept[v].push_back (static_cast<std::size_t> (grow (c.partial, c.edge, true)));
        }
    }

    std::vector<Skeleton> out;
    for (const std::size_t goal : graph.goals ())
        for (const std::size_t p : kept[goal])
        {
            Skeleton sk;
            for (std::int64_t cur = static_cast<std::int64_t> (p); cur >= 0; cur = arena[static_cast<std::size_t> (cur)].parent)
                sk.nodes.push_back (to_skeleton_node (graph, arena[static_cast<std::size_t> (cur)].node));
            std::reverse (sk.nodes.begin (), sk.nodes.end ());
            sk.cost = arena[p].exact.total;
            sk.terms = arena[p].exact.terms;
            sk.skipped_angles = arena[p].exact.skipped_angles;
            out.push_back (std::move (sk));
        }
    std::sort (out.begin (), out.end (), skeleton_less);
    return out;
}

namespace
{

/// (l, t) of a skeleton at longitudinal position s (nodes are monotone in s).
SltPoint at_s (const Skeleton &sk, double s)
{
    const auto &n = sk.nodes;
    if (s <= n.front ().s)
        return n.front ().slt ();
    for (std::size_t i = 1; i < n.size (); ++i)
    {
        if (s <= n[i].s)
        {
            const double span = n[i].s - n[i - 1].s;
            const double w = span > 0.0 ? (s - n[i - 1].s) / span : 1.0;
            return {s, n[i - 1].l + w * (n[i].l - n[i - 1].l), n[i - 1].t + w * (n[i].t - n[i - 1].t)};
        }
    }
    return n.back ().slt ();
}

} // namespace

bool uvd_equivalent (const Skeleton &a, const Skeleton &b, double ds, std::span<const ObstacleTrajectory> obstacles,
                     const Centerline &line, const VisibilityParams &vis)
{
    if (a.nodes.size () < 2 || b.nodes.size () < 2)
        throw PreconditionError ("uvd_equivalent: skeletons need at least two nodes");
    auto same = [] (const SkeletonNode &x, const SkeletonNode &y) {
        return std::abs (x.s - y.s) < 1e-9 && std::abs (x.l - y.l) < 1e-9;
    };
    if (!same (a.nodes.front (), b.nodes.front ()) || !same (a.nodes.back (), b.nodes.back ()))
        throw PreconditionError ("uvd_equivalent: skeletons must share start and goal positions");
    const double s0 = a.nodes.front ().s, s1 = a.nodes.back ().s;
    const auto n = std::max<std::size_t> (1, static_cast<std::size_t> (std::ceil ((s1 - s0) / ds - 1e-9)));
    for (std::size_t k = 0; k <= n; ++k)
    {
        const double s = k == n ? s1 : s0 + (s1 - s0) * static_cast<double> (k) / static_cast<double> (n);
        if (!segment_clear (at_s (a, s), at_s (b, s), obstacles, line, vis))
            return false;
    }
    return true;
}

DistinctSkeletons extract_distinct_skeletons (const StGraph &graph, const StsProblem &problem,
                                              const CostWeights &weights, const SearchParams &params)
{
    DistinctSkeletons out;
    std::vector<Skeleton> all = enumerate_skeletons (graph, problem, weights, params);
    out.enumerated = all.size ();
    if (all.empty ())
    {
        out.diagnostic = "no skeleton reaches the goal set";
        return out;
    }
    const VisibilityParams vis = planning_visibility (problem, params);
    for (auto &candidate : all)
    {
        const bool novel = std::none_of (out.skeletons.begin (), out.skeletons.end (), [&] (const Skeleton &kept) {
            return uvd_equivalent (kept, candidate, params.uvd_step, problem.obstacles, *problem.line, vis);
        });
        if (novel)
        {
            out.skeletons.push_back (std::move (candidate));
            if (out.skeletons.size () == params.num_skeletons)
                break;
        }
    }
    return out;
}

} // namespace overtake
