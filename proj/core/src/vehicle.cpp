#include <overtake/vehicle.hpp>

#include <cmath>

#include <overtake/errors.hpp>

namespace overtake
{

double VehicleParams::half_diagonal () const { return 0.5 * std::hypot (length, width); }

void VehicleParams::validate () const
{
    auto positive = [] (double v, const char *name) {
        if (!(v > 0.0))
            throw ValidationError (name, "must be positive");
    };
    positive (wheelbase, "vehicle.wheelbase");
    positive (length, "vehicle.length");
    positive (width, "vehicle.width");
    positive (v_max, "vehicle.v_max");
    positive (a_max, "vehicle.a_max");
    positive (steer_max, "vehicle.steer_max");
    positive (accel_uncertainty, "vehicle.accel_uncertainty");
    positive (steer_uncertainty, "vehicle.steer_uncertainty");
    if (!(steer_max < std::numbers::pi / 2.0))
        throw ValidationError ("vehicle.steer_max", "must be below pi/2");
}

Eigen::Vector4d bicycle_rhs (const Eigen::Vector4d &state, const Eigen::Vector2d &input, double wheelbase)
{
    const double v = state (2), theta = state (3);
    return {v * std::cos (theta), v * std::sin (theta), input (0), v * std::tan (input (1)) / wheelbase};
}

Eigen::Vector4d rk4_step (const Eigen::Vector4d &state, const Eigen::Vector2d &input, double wheelbase, double h)
{
    return rk4_step (state, 0.0, [&] (double) { return input; }, wheelbase, h);
}

} // namespace overtake
