#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <overtake/polynomial.hpp>
#include <overtake/sts_search.hpp>

namespace overtake
{

/// Fidelity weight alpha1 and jerk weight alpha2; r_alpha = alpha2 / alpha1.
struct FitWeights
{
    double fidelity = 1.0;
    double jerk = 0.0;

    static FitWeights from_ratio (double r_alpha) { return {1.0, r_alpha}; }
    double ratio () const { return jerk / fidelity; }
    void validate () const;
};

/// Position, velocity and acceleration pinned at one end of the fit.
struct BoundaryState
{
    Eigen::Vector2d position = Eigen::Vector2d::Zero ();
    Eigen::Vector2d velocity = Eigen::Vector2d::Zero ();
    Eigen::Vector2d acceleration = Eigen::Vector2d::Zero ();
};

/// What a fit tracks: knot times, the target curve Q*(t) and both boundary states.
struct FitReference
{
    std::vector<double> knots; ///< starts at 0, strictly increasing
    std::function<Eigen::Vector2d (double)> target;
    BoundaryState start;
    BoundaryState end;
};

/**
 * Reference for a skeleton: knots at node times (shifted to start at 0),
 * target = piecewise-linear interpolation of the node positions, boundary
 * velocity from one-sided differences and acceleration from the three-point
 * second difference (zero for a single edge).
 */
FitReference skeleton_reference (const Skeleton &skeleton);

/// Minimizes alpha1 * int |Q - Q*|^2 + alpha2 * int |Q'''|^2 with the boundary states fixed.
/// Throws IllConditionedError for degenerate knot spacing or a singular normal system.
PolynomialTrajectory fit_reference (const FitReference &ref, const FitWeights &weights);

PolynomialTrajectory fit_skeleton (const Skeleton &skeleton, const FitWeights &weights);

struct FitObjective
{
    double fidelity = 0.0; ///< int |Q - Q*|^2
    double jerk = 0.0;     ///< int |Q'''|^2
    double total = 0.0;
};

/// Objective terms evaluated per segment of `traj` (8-point Gauss-Legendre for fidelity, exact jerk).
FitObjective fit_objective (const PolynomialTrajectory &traj, const FitReference &ref, const FitWeights &weights);

struct CandidateFit
{
    double r_alpha = 0.0;
    std::optional<PolynomialTrajectory> trajectory;
    std::string error; ///< set when the fit failed
};

/// One fit per grid value (alpha1 = 1, alpha2 = r_alpha), run on up to `threads` workers.
std::vector<CandidateFit> generate_candidates (const Skeleton &skeleton, std::span<const double> r_grid,
                                               std::size_t threads = 1);

} // namespace overtake
