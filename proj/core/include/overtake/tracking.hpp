#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <overtake/flatness.hpp>
#include <overtake/polynomial.hpp>
#include <overtake/vehicle.hpp>

namespace overtake
{

struct PurePursuitConfig
{
    double lookahead_gain = 0.1; ///< s, L_d grows by this times the speed
    double base_lookahead = 0.8; ///< m
    double speed_gain = 5.0;     ///< 1/s
    std::size_t horizon = 50;    ///< evaluation samples n for the RMSE metrics (0 = every log entry)
    double sim_step = 1e-3;      ///< s
    double divergence_limit = 10.0; ///< m
    bool accel_feedforward = true; ///< add the reference acceleration to the speed loop

    double lookahead (double v) const { return lookahead_gain * v + base_lookahead; }
    void validate () const;
};

/**
 * Dense polyline copy of a trajectory used for lookahead queries.
 *
 * Queries past the last point follow a straight extension along the final
 * heading, so the controller always has a target near the end.
 */
class PursuitPath
{
  public:
    explicit PursuitPath (const PolynomialTrajectory &traj, double spacing_dt = 0.01);

    /// Index of the path point nearest to (x, y), searched forward from `hint`.
    std::size_t project (double x, double y, std::size_t hint) const;
    /// Point `distance` m of arc length ahead of path point `from`.
    Eigen::Vector2d ahead (std::size_t from, double distance) const;
    std::size_t size () const { return points_.size (); }
    bool at_end (std::size_t index) const { return index + 1 >= points_.size (); }

  private:
    std::vector<Eigen::Vector2d> points_;
    std::vector<double> arc_;
    Eigen::Vector2d end_dir_;
};

struct PursuitCommand
{
    VehicleInput input;
    std::size_t projection = 0; ///< path index of the vehicle projection
    bool track_end = false;     ///< the projection reached the last path point
};

/**
 * Steering toward the lookahead point and speed control toward v_ref, both clipped.
 *
 * The speed loop is a_ref + K_p (v_ref - v) when feedforward is enabled and the
 * plain proportional law otherwise.
 */
PursuitCommand pure_pursuit_step (const VehicleState &state, double v_ref, const PursuitPath &path, std::size_t hint,
                                  const PurePursuitConfig &cfg, const VehicleParams &params, double a_ref = 0.0);

struct TrackingSample
{
    double t = 0.0;
    VehicleState state;
    VehicleInput input;
};

/// Closed-loop RK4 simulation from the trajectory's start state until its end time.
/// Throws DivergenceError when the time-matched position error exceeds the limit.
std::vector<TrackingSample> simulate_tracking (const PolynomialTrajectory &traj, const PurePursuitConfig &cfg,
                                               const VehicleParams &params);

struct TrackingMetrics
{
    double lateral = 0.0;  ///< E_l, m
    double position = 0.0; ///< E_p, m
    double heading = 0.0;  ///< E_theta, rad
    double yaw_rate = 0.0; ///< omega_m, mean |theta'|, rad/s
};

/// Log entries used for the metrics: `n` evenly spaced indices, or all of them when n == 0 or n >= size.
std::vector<std::size_t> evaluation_indices (std::size_t log_size, std::size_t n);

/// RMSE errors against the time-matched reference states from `reference(t)`.
template <class ReferenceFn>
TrackingMetrics tracking_metrics (std::span<const TrackingSample> log, ReferenceFn &&reference, double wheelbase,
                                  std::size_t n = 0);

TrackingMetrics tracking_metrics (std::span<const TrackingSample> log, const PolynomialTrajectory &traj,
                                  const VehicleParams &params, std::size_t n = 0);

/// Spearman rank correlation with average ranks for ties.
double rank_correlation (std::span<const double> a, std::span<const double> b);

} // namespace overtake

#include <cmath>

#include <overtake/errors.hpp>
#include <overtake/math.hpp>

namespace overtake
{

template <class ReferenceFn>
TrackingMetrics tracking_metrics (std::span<const TrackingSample> log, ReferenceFn &&reference, double wheelbase,
                                  std::size_t n)
{
    if (log.empty ())
        throw PreconditionError ("tracking_metrics: empty log");
    TrackingMetrics m;
    const std::vector<std::size_t> idx = evaluation_indices (log.size (), n);
    for (const std::size_t i : idx)
    {
        const TrackingSample &s = log[i];
        const VehicleState ref = reference (s.t);
        const double dx = s.state.x - ref.x, dy = s.state.y - ref.y;
        const double lat = -std::sin (ref.theta) * dx + std::cos (ref.theta) * dy;
        const double dth = angle_diff (ref.theta, s.state.theta);
        m.lateral += lat * lat;
        m.position += dx * dx + dy * dy;
        m.heading += dth * dth;
        m.yaw_rate += std::abs (s.state.v * std::tan (s.input.steer) / wheelbase);
    }
    const double k = static_cast<double> (idx.size ());
    m.lateral = std::sqrt (m.lateral / k);
    m.position = std::sqrt (m.position / k);
    m.heading = std::sqrt (m.heading / k);
    m.yaw_rate /= k;
    return m;
}

} // namespace overtake
