#pragma once

#include <vector>

#include <overtake/polynomial.hpp>
#include <overtake/vehicle.hpp>

namespace overtake
{

/// Speeds at or below this make heading and steering undefined.
inline constexpr double kMinFlatSpeed = 1e-3;

struct FlatSample
{
    double t = 0.0;
    VehicleState state;
    VehicleInput input;
};

/// State and input implied by the flat outputs (x, y) of `traj` at time t.
/// Throws DegenerateSpeedError when the planar speed is <= eps_v.
FlatSample flat_state_at (const PolynomialTrajectory &traj, double t, double wheelbase,
                          double eps_v = kMinFlatSpeed);

/**
 * Samples states and inputs along the trajectory at t = 0, dt, 2 dt, ..., T.
 *
 * The final sample lands on T exactly: dt is shrunk to T / ceil(T / dt) when
 * it does not divide the duration.
 */
std::vector<FlatSample> recover_states_inputs (const PolynomialTrajectory &traj, double dt,
                                               const VehicleParams &params, double eps_v = kMinFlatSpeed);

/// Same samples for exactly n equal steps (n + 1 samples).
std::vector<FlatSample> recover_states_inputs_steps (const PolynomialTrajectory &traj, std::size_t n,
                                                     const VehicleParams &params, double eps_v = kMinFlatSpeed);

/**
 * Time average of the flat inputs over each of n equal steps.
 *
 * Acceleration enters the speed equation linearly, so holding the step mean
 * reproduces the reference speed at every step end exactly.
 */
std::vector<VehicleInput> mean_step_inputs (const PolynomialTrajectory &traj, std::size_t n,
                                           const VehicleParams &params, double eps_v = kMinFlatSpeed);

/// Actuation limits check against the vehicle parameters.
bool input_admissible (const VehicleInput &u, const VehicleParams &params);

} // namespace overtake
