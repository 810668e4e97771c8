#pragma once

#include <numbers>

#include <Eigen/Core>

namespace overtake
{

/// Kinematic bicycle state at the rear-axle center.
struct VehicleState
{
    double x = 0.0;
    double y = 0.0;
    double v = 0.0;
    double theta = 0.0;

    Eigen::Vector4d as_vector () const { return {x, y, v, theta}; }
    static VehicleState from_vector (const Eigen::Vector4d &s) { return {s (0), s (1), s (2), s (3)}; }
};

struct VehicleInput
{
    double accel = 0.0; ///< longitudinal acceleration a_t, m/s^2
    double steer = 0.0; ///< front-wheel angle delta, rad

    Eigen::Vector2d as_vector () const { return {accel, steer}; }
};

/// Vehicle geometry, actuation limits and input uncertainty (defaults: simulation settings table).
struct VehicleParams
{
    double wheelbase = 2.8;
    double length = 4.3;
    double width = 1.9;
    double v_max = 15.0;
    double a_max = 5.0;
    double steer_max = std::numbers::pi / 6.0;
    double accel_uncertainty = 0.01;  ///< U_r, m/s^2
    double steer_uncertainty = 0.005; ///< U_r, rad

    double half_diagonal () const;
    /// Throws ValidationError naming the offending field.
    void validate () const;
};

/// Right-hand side of the kinematic bicycle model, state order (x, y, v, theta).
Eigen::Vector4d bicycle_rhs (const Eigen::Vector4d &state, const Eigen::Vector2d &input, double wheelbase);

/// One classical Runge-Kutta step with the input held constant over the step.
Eigen::Vector4d rk4_step (const Eigen::Vector4d &state, const Eigen::Vector2d &input, double wheelbase, double h);

/// RK4 step with a time-varying input u(t).
template <class InputFn>
Eigen::Vector4d rk4_step (const Eigen::Vector4d &state, double t, InputFn &&input, double wheelbase, double h)
{
    const Eigen::Vector4d k1 = bicycle_rhs (state, input (t), wheelbase);
    const Eigen::Vector4d k2 = bicycle_rhs (state + 0.5 * h * k1, input (t + 0.5 * h), wheelbase);
    const Eigen::Vector4d k3 = bicycle_rhs (state + 0.5 * h * k2, input (t + 0.5 * h), wheelbase);
    const Eigen::Vector4d k4 = bicycle_rhs (state + h * k3, input (t + h), wheelbase);
    return state + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace overtake
