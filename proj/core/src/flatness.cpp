#include <overtake/flatness.hpp>

#include <cmath>
#include <string>

#include <overtake/errors.hpp>
#include <overtake/quadrature.hpp>

namespace overtake
{

FlatSample flat_state_at (const PolynomialTrajectory &traj, double t, double wheelbase, double eps_v)
{
    const auto q = traj.evaluate (t);
    const double xd = q.velocity.x (), yd = q.velocity.y ();
    const double xdd = q.acceleration.x (), ydd = q.acceleration.y ();
    const double v2 = xd * xd + yd * yd;
    const double v = std::sqrt (v2);
    if (!(v > eps_v))
        throw DegenerateSpeedError (t, "flatness: planar speed " + std::to_string (v) + " m/s at t = " +
                                           std::to_string (t) + " s is below the guard");
    FlatSample out;
    out.t = t;
    out.state = {q.position.x (), q.position.y (), v, std::atan2 (yd, xd)};
    out.input.accel = (xd * xdd + yd * ydd) / v;
    out.input.steer = std::atan ((xd * ydd - yd * xdd) * wheelbase / (v2 * v));
    return out;
}

std::vector<FlatSample> recover_states_inputs_steps (const PolynomialTrajectory &traj, std::size_t n,
                                                     const VehicleParams &params, double eps_v)
{
    if (n == 0)
        throw PreconditionError ("recover_states_inputs: need at least one step");
    const double T = traj.duration ();
    std::vector<FlatSample> out;
    out.reserve (n + 1);
    for (std::size_t k = 0; k <= n; ++k)
    {
        const double t = k == n ? T : T * static_cast<double> (k) / static_cast<double> (n);
        out.push_back (flat_state_at (traj, t, params.wheelbase, eps_v));
    }
    return out;
}

std::vector<FlatSample> recover_states_inputs (const PolynomialTrajectory &traj, double dt,
                                               const VehicleParams &params, double eps_v)
{
    if (!(dt > 0.0))
        throw PreconditionError ("recover_states_inputs: dt must be positive");
    const auto n = static_cast<std::size_t> (std::max (1.0, std::ceil (traj.duration () / dt - 1e-9)));
    return recover_states_inputs_steps (traj, n, params, eps_v);
}

std::vector<VehicleInput> mean_step_inputs (const PolynomialTrajectory &traj, std::size_t n,
                                           const VehicleParams &params, double eps_v)
{
    if (n == 0)
        throw PreconditionError ("mean_step_inputs: need at least one step");
    const double T = traj.duration ();
    std::vector<VehicleInput> out;
    out.reserve (n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const double a = T * static_cast<double> (k) / static_cast<double> (n);
        const double b = k + 1 == n ? T : T * static_cast<double> (k + 1) / static_cast<double> (n);
        VehicleInput u;
        u.accel = gauss_legendre (a, b, [&] (double t) { return flat_state_at (traj, t, params.wheelbase, eps_v).input.accel; }) / (b - a);
        u.steer = gauss_legendre (a, b, [&] (double t) { return flat_state_at (traj, t, params.wheelbase, eps_v).input.steer; }) / (b - a);
        out.push_back (u);
    }
    return out;
}

bool input_admissible (const VehicleInput &u, const VehicleParams &params)
{
    return std::abs (u.accel) <= params.a_max && std::abs (u.steer) <= params.steer_max;
}

} // namespace overtake
