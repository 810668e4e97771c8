#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <overtake/flatness.hpp>
#include <overtake/vehicle.hpp>
#include <overtake/zonotope.hpp>

namespace overtake
{

/**
 * Linearization of the bicycle model around (xi*, u*) for one step of length r.
 *
 * The continuous Jacobians are kept alongside the discrete forms
 * A* = A_c r, B* = B_c r, C* = f r - A* xi* - B* u*.
 */
struct LinearizedStep
{
    Eigen::Matrix4d A_c;
    Eigen::Matrix<double, 4, 2> B_c;
    Eigen::Vector4d f;        ///< f(xi*, u*)
    Eigen::Vector4d ref_state;
    Eigen::Vector2d ref_input;
    double r = 0.0;

    Eigen::Matrix4d A_star () const { return A_c * r; }
    Eigen::Matrix<double, 4, 2> B_star () const { return B_c * r; }
    Eigen::Vector4d C_star () const { return f * r - A_star () * ref_state - B_star () * ref_input; }
    /// Discrete augmented matrix [A* C*; 0 0] acting on [xi; 1].
    Eigen::Matrix<double, 5, 5> augmented () const;
    /// Continuous augmented matrix [A_c, f - A_c xi*; 0 0]; input deviations enter through B_c.
    Eigen::Matrix<double, 5, 5> augmented_continuous () const;
};

/// Throws LinearizationError when |delta*| is at or beyond pi/2, PreconditionError for r <= 0.
LinearizedStep linearize_model (const VehicleState &ref, const VehicleInput &input, double r, const VehicleParams &params);

/// Truncated-Taylor propagation data for x' = A x over a step r.
struct TaylorTerms
{
    Eigen::MatrixXd expm;                  ///< e^{A r}
    std::vector<Eigen::MatrixXd> gamma;    ///< A^i r^{i+1} / (i+1)!, i = 0..order
    Eigen::MatrixXd gamma_sum;             ///< sum of `gamma`
    Eigen::MatrixXd remainder;             ///< W(r) = e^{|A| r} - sum_{i<=order} (|A| r)^i / i!
    IntervalMatrix eps_p;                  ///< [-W r, W r]
    IntervalMatrix hull_error;             ///< curvature error of the linear interpolation over [0, r]
};

/// Matrix exponential by scaling and squaring of a Taylor polynomial.
Eigen::MatrixXd expm (const Eigen::MatrixXd &A);

TaylorTerms taylor_propagation_terms (const Eigen::MatrixXd &A, double r, int order);

/// Reachable set at time r of x' = A x + w, w(t) in U (zero-centered), from x(0) = 0.
Zonotope input_reach (const TaylorTerms &terms, const Zonotope &U);

struct TubeOptions
{
    int taylor_order = 6;
    std::size_t max_generators = 20;
    /// Bound the linearization error with interval Hessians. Turning it off is faster but not sound.
    bool lagrange_remainder = true;
};

struct ReachTube
{
    std::vector<Zonotope> point_sets;    ///< R(t_k), k = 0..N
    std::vector<Zonotope> interval_sets; ///< R(tau_k) over [t_k, t_{k+1}], k = 0..N-1
    std::vector<double> times;           ///< t_k
    std::vector<Eigen::Vector4d> lagrange; ///< per-step bound on the linearization error rate (bicycle only)
};

/// Tube for a linear system x' = A x + B u, u in `input` (center acts as a constant input).
ReachTube propagate_linear_tube (const Eigen::MatrixXd &A, const Eigen::MatrixXd &B, const Zonotope &initial,
                                 const Zonotope &input, double r, std::size_t steps, const TubeOptions &options = {});

/// Reference input applied over step k: the mean of the sampled inputs at both ends.
std::vector<VehicleInput> step_reference_inputs (std::span<const FlatSample> samples);

/**
 * Bicycle-model tube along sampled reference states and inputs.
 *
 * Samples must be spaced exactly r apart. Each step relinearizes at the mean
 * of its two end reference states with the step reference input; input
 * deviations within +-`input_radius` (accel, steer) enter through B_c.
 */
ReachTube propagate_tube (std::span<const FlatSample> samples, const Eigen::Vector2d &input_radius, double r,
                          const VehicleParams &params, const TubeOptions &options = {});

/// Same, holding `step_inputs[k]` over step k instead of the endpoint mean.
ReachTube propagate_tube (std::span<const FlatSample> samples, std::span<const VehicleInput> step_inputs,
                          const Eigen::Vector2d &input_radius, double r, const VehicleParams &params,
                          const TubeOptions &options = {});

/// Uncertainty box taken from the vehicle parameters.
inline Eigen::Vector2d input_uncertainty (const VehicleParams &p) { return {p.accel_uncertainty, p.steer_uncertainty}; }

/// Heading shifted by a multiple of 2 pi to lie closest to `near`.
Eigen::Vector4d align_heading (Eigen::Vector4d state, double near);

struct FeasibilityResult
{
    bool high = false;
    std::optional<std::size_t> first_violation;
};

/// High iff every reference state xi*_k lies in R(tau_k), k = 0..N-1.
FeasibilityResult assess_feasibility (std::span<const FlatSample> samples, const ReachTube &tube, double tol = 1e-6);

struct FeasibilityWeights
{
    double lambda_p = 1.0;
    double lambda_v = 1.0;
    double lambda_theta = 1.0;
    double d_r = 1.0;       ///< m
    double v_r = 1.0;       ///< m/s
    double theta_r = 0.1;  ///< rad

    void validate () const;
};

struct JrsScore
{
    double total = 0.0;
    double position = 0.0; ///< mean position deviation, m
    double speed = 0.0;    ///< mean speed deviation, m/s
    double heading = 0.0;  ///< mean heading deviation, rad
};

/// Mean normalized deviation of xi*_k from the centers of R(t_k), k = 1..N.
JrsScore score_jrs (std::span<const FlatSample> samples, const ReachTube &tube, const FeasibilityWeights &w);

/// Tube as JSON text: one object per step with center and generators.
std::string tube_to_json (const ReachTube &tube);

} // namespace overtake
