#pragma once

// Hand-rolled random generators and small oracles shared by the unit and
// acceptance tests. Everything is seeded explicitly so failures replay.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <overtake/flatness.hpp>
#include <overtake/geometry.hpp>
#include <overtake/polynomial.hpp>
#include <overtake/sts_search.hpp>
#include <overtake/traj_fit.hpp>
#include <overtake/vehicle.hpp>
#include <overtake/zonotope.hpp>

namespace testsupport
{

inline std::filesystem::path scenario_path (const std::string &file)
{
    return std::filesystem::path (OVERTAKE_SCENARIO_DIR) / file;
}

class Rng
{
  public:
    explicit Rng (std::uint64_t seed) : engine_ (seed) {}

    double uniform (double lo, double hi) { return std::uniform_real_distribution<double> (lo, hi) (engine_); }
    int integer (int lo, int hi) { return std::uniform_int_distribution<int> (lo, hi) (engine_); }
    bool coin () { return integer (0, 1) == 1; }
    /// -1 or +1 with equal probability, otherwise uniform in between.
    double extreme_or_uniform ()
    {
        const int k = integer (0, 3);
        return k == 0 ? -1.0 : k == 1 ? 1.0 : uniform (-1.0, 1.0);
    }

    Eigen::VectorXd vector (Eigen::Index n, double lo, double hi)
    {
        Eigen::VectorXd v (n);
        for (Eigen::Index i = 0; i < n; ++i)
            v (i) = uniform (lo, hi);
        return v;
    }

    std::mt19937_64 &engine () { return engine_; }

  private:
    std::mt19937_64 engine_;
};

/// Random state well inside the model's domain (speed away from zero, heading anywhere).
inline Eigen::Vector4d random_state (Rng &rng)
{
    return {rng.uniform (-50.0, 50.0), rng.uniform (-50.0, 50.0), rng.uniform (1.0, 15.0), rng.uniform (-3.1, 3.1)};
}

inline Eigen::Vector2d random_input (Rng &rng)
{
    return {rng.uniform (-5.0, 5.0), rng.uniform (-0.5, 0.5)};
}

/// Random zonotope with `gens` generators in `dim` dimensions.
inline overtake::Zonotope random_zonotope (Rng &rng, Eigen::Index dim, Eigen::Index gens)
{
    Eigen::MatrixXd G (dim, gens);
    for (Eigen::Index j = 0; j < gens; ++j)
        G.col (j) = rng.vector (dim, -1.0, 1.0);
    return {rng.vector (dim, -2.0, 2.0), G};
}

/**
 * Skeleton on a straight road along +x (so x = s, y = l): `nodes` nodes spaced
 * 0.6-1.2 s apart at speed v, with lateral offsets drifting by at most one lane step.
 */
inline overtake::Skeleton random_skeleton (Rng &rng, std::size_t nodes, double v)
{
    overtake::Skeleton sk;
    double s = 0.0, l = rng.integer (-2, 2) * 0.9, t = 0.0;
    for (std::size_t i = 0; i < nodes; ++i)
    {
        overtake::SkeletonNode n;
        n.id = i;
        n.s = n.x = s;
        n.l = n.y = l;
        n.t = t;
        sk.nodes.push_back (n);
        const double dt = rng.uniform (0.6, 1.2);
        t += dt;
        s += v * dt;
        l = std::clamp (l + rng.integer (-1, 1) * 0.9, -2.7, 2.7);
    }
    return sk;
}

/// True when every flatness sample of `traj` (every 10 ms) respects the actuation and speed limits.
inline bool admissible (const overtake::PolynomialTrajectory &traj, const overtake::VehicleParams &params,
                        double min_speed = 1.0)
{
    for (double t = 0.0; t <= traj.duration () + 1e-12; t += 0.01)
    {
        const Eigen::Vector2d vel = traj.derivative (t, 1);
        if (vel.norm () < min_speed || vel.norm () > params.v_max)
            return false;
        if (!overtake::input_admissible (overtake::flat_state_at (traj, t, params.wheelbase).input, params))
            return false;
    }
    return true;
}

/// A fitted candidate on a random skeleton that passes the admissibility check.
inline overtake::PolynomialTrajectory random_admissible_candidate (Rng &rng, const overtake::VehicleParams &params)
{
    static const double grid[] = {0.0, 0.005, 0.01, 0.015, 0.025, 0.05, 0.1};
    for (;;)
    {
        const auto sk = random_skeleton (rng, static_cast<std::size_t> (rng.integer (3, 6)), rng.uniform (6.0, 13.0));
        const double r_alpha = grid[rng.integer (0, 6)];
        const auto traj = overtake::fit_skeleton (sk, overtake::FitWeights::from_ratio (r_alpha));
        if (admissible (traj, params))
            return traj;
    }
}

/**
 * Smooth random trajectory built from an analytic curve: constant-acceleration
 * progress along a random heading plus a sinusoidal lateral sway, sampled at
 * the knots and joined with Hermite quintics.
 */
inline overtake::PolynomialTrajectory random_smooth_trajectory (Rng &rng, double duration, std::size_t segments)
{
    const double v0 = rng.uniform (6.0, 12.0), a0 = rng.uniform (-1.0, 1.0);
    const double amp = rng.uniform (0.2, 1.2), omega = rng.uniform (0.5, 2.0), phase = rng.uniform (0.0, 6.28);
    const double heading = rng.uniform (-3.1, 3.1);
    const Eigen::Vector2d along (std::cos (heading), std::sin (heading)), lat (-along.y (), along.x ());
    const Eigen::Vector2d origin (rng.uniform (-20.0, 20.0), rng.uniform (-20.0, 20.0));
    auto deriv = [&] (double t, int order) -> Eigen::Vector2d {
        const double c = std::cos (omega * t + phase), s = std::sin (omega * t + phase);
        switch (order)
        {
        case 0:
            return origin + (v0 * t + 0.5 * a0 * t * t) * along + amp * s * lat;
        case 1:
            return (v0 + a0 * t) * along + amp * omega * c * lat;
        default:
            return a0 * along - amp * omega * omega * s * lat;
        }
    };
    std::vector<double> knots;
    std::vector<overtake::Quintic> xs, ys;
    const double h = duration / static_cast<double> (segments);
    for (std::size_t i = 0; i <= segments; ++i)
        knots.push_back (h * static_cast<double> (i));
    for (std::size_t i = 0; i < segments; ++i)
    {
        const double ta = knots[i], tb = knots[i + 1];
        const Eigen::Vector2d p0 = deriv (ta, 0), v0v = deriv (ta, 1), acc0 = deriv (ta, 2);
        const Eigen::Vector2d p1 = deriv (tb, 0), v1v = deriv (tb, 1), acc1 = deriv (tb, 2);
        xs.push_back (overtake::hermite_quintic (p0.x (), v0v.x (), acc0.x (), p1.x (), v1v.x (), acc1.x (), h));
        ys.push_back (overtake::hermite_quintic (p0.y (), v0v.y (), acc0.y (), p1.y (), v1v.y (), acc1.y (), h));
    }
    return {knots, xs, ys};
}

/// Straight constant-speed trajectory along +x.
inline overtake::PolynomialTrajectory straight_trajectory (double speed, double duration, double y = 0.0)
{
    return {{0.0, duration},
            {overtake::hermite_quintic (0.0, speed, 0.0, speed * duration, speed, 0.0, duration)},
            {overtake::hermite_quintic (y, 0.0, 0.0, y, 0.0, 0.0, duration)}};
}

/// Obstacle parked at (x, y) on a straight road along +x.
inline overtake::ObstacleTrajectory parked (double x, double y, double length = 4.3, double width = 1.9)
{
    return {{{0.0, x, y, 0.0}, {100.0, x, y, 0.0}}, length, width};
}

/// Point-in-oriented-rectangle test written independently of the library's distance code.
inline bool inside_rect (const Eigen::Vector2d &p, double cx, double cy, double heading, double half_len, double half_wid)
{
    const double dx = p.x () - cx, dy = p.y () - cy;
    const double along = std::cos (heading) * dx + std::sin (heading) * dy;
    const double across = -std::sin (heading) * dx + std::cos (heading) * dy;
    return std::abs (along) <= half_len && std::abs (across) <= half_wid;
}

/// Position on a skeleton polyline at progress s (linear in s between nodes), with its time.
inline overtake::SltPoint skeleton_at_s (const overtake::Skeleton &sk, double s)
{
    const auto &n = sk.nodes;
    if (s <= n.front ().s)
        return n.front ().slt ();
    for (std::size_t i = 0; i + 1 < n.size (); ++i)
        if (s <= n[i + 1].s)
        {
            const double span = n[i + 1].s - n[i].s;
            const double w = span > 0.0 ? (s - n[i].s) / span : 1.0;
            return {s, n[i].l + w * (n[i + 1].l - n[i].l), n[i].t + w * (n[i + 1].t - n[i].t)};
        }
    return n.back ().slt ();
}

} // namespace testsupport
