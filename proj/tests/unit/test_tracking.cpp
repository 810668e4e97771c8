#include <cmath>
#include <vector>

#include <doctest.h>

#include <overtake/errors.hpp>
#include <overtake/math.hpp>
#include <overtake/tracking.hpp>

#include "generators.hpp"

using namespace overtake;
using testsupport::Rng;

TEST_CASE ("lookahead distance grows with speed")
{
    const PurePursuitConfig cfg;
    CHECK (cfg.lookahead (0.0) == doctest::Approx (0.8));
    CHECK (cfg.lookahead (10.0) == doctest::Approx (1.8));
    CHECK (cfg.horizon == 50);
    CHECK (cfg.speed_gain == 5.0);
}

TEST_CASE ("pure pursuit commands")
{
    const VehicleParams params;
    const PurePursuitConfig cfg;
    const PolynomialTrajectory line = testsupport::straight_trajectory (10.0, 3.0);
    const PursuitPath path (line);

    const PursuitCommand on = pure_pursuit_step ({0.0, 0.0, 10.0, 0.0}, 10.0, path, 0, cfg, params);
    CHECK (on.input.steer == doctest::Approx (0.0));
    CHECK (on.input.accel == doctest::Approx (0.0));

    // right of the path: steer left; the geometric law fixes the angle
    const PursuitCommand right = pure_pursuit_step ({5.0, -0.1, 10.0, 0.0}, 10.0, path, 0, cfg, params);
    const double ld = cfg.lookahead (10.0);
    const Eigen::Vector2d target = path.ahead (right.projection, ld);
    const double alpha = std::atan2 (target.y () + 0.1, target.x () - 5.0);
    CHECK (right.input.steer > 0.0);
    CHECK (right.input.steer == doctest::Approx (std::atan (2.0 * params.wheelbase * std::sin (alpha) / ld)));

    // far off the path the steering saturates
    const PursuitCommand far = pure_pursuit_step ({5.0, -30.0, 10.0, 0.0}, 10.0, path, 0, cfg, params);
    CHECK (far.input.steer == doctest::Approx (params.steer_max));

    // speed loop: proportional, clipped, with optional feedforward
    const PursuitCommand slow = pure_pursuit_step ({0.0, 0.0, 9.9, 0.0}, 10.0, path, 0, cfg, params);
    CHECK (slow.input.accel == doctest::Approx (0.5));
    const PursuitCommand very_slow = pure_pursuit_step ({0.0, 0.0, 2.0, 0.0}, 10.0, path, 0, cfg, params);
    CHECK (very_slow.input.accel == doctest::Approx (params.a_max));
    const PursuitCommand ff = pure_pursuit_step ({0.0, 0.0, 9.9, 0.0}, 10.0, path, 0, cfg, params, 1.0);
    CHECK (ff.input.accel == doctest::Approx (1.5));
    PurePursuitConfig plain = cfg;
    plain.accel_feedforward = false;
    const PursuitCommand noff = pure_pursuit_step ({0.0, 0.0, 9.9, 0.0}, 10.0, path, 0, plain, params, 1.0);
    CHECK (noff.input.accel == doctest::Approx (0.5));
}

TEST_CASE ("tracking a straight line is exact")
{
    const VehicleParams params;
    const PurePursuitConfig cfg;
    const PolynomialTrajectory line = testsupport::straight_trajectory (10.0, 3.0);
    const auto log = simulate_tracking (line, cfg, params);
    REQUIRE (log.size () >= 3000);
    const TrackingMetrics m = tracking_metrics (log, line, params, cfg.horizon);
    CHECK (m.lateral < 1e-9);
    CHECK (m.position < 1e-6);
    CHECK (m.heading < 1e-9);
    CHECK (m.yaw_rate < 1e-9);
}

TEST_CASE ("property: tracking errors are consistent on random trajectories")
{
    const VehicleParams params;
    const PurePursuitConfig cfg;
    Rng rng (81);
    for (int i = 0; i < 8; ++i)
    {
        PolynomialTrajectory t;
        do
            t = testsupport::random_smooth_trajectory (rng, 4.0, 4);
        while (!testsupport::admissible (t, params));
        const auto log = simulate_tracking (t, cfg, params);
        CHECK (log.front ().t == 0.0);
        CHECK (log.back ().t == doctest::Approx (4.0));
        for (const std::size_t n : {std::size_t{0}, std::size_t{50}})
        {
            const TrackingMetrics m = tracking_metrics (log, t, params, n);
            CHECK (m.lateral >= 0.0);
            CHECK (m.lateral <= m.position + 1e-12);
            CHECK (m.heading >= 0.0);
            CHECK (m.yaw_rate >= 0.0);
            CHECK (m.position < 1.0);
        }
    }
}

TEST_CASE ("divergence is reported")
{
    const VehicleParams params;
    PurePursuitConfig cfg;
    cfg.divergence_limit = 1e-9;
    Rng rng (82);
    const PolynomialTrajectory t = testsupport::random_smooth_trajectory (rng, 4.0, 4);
    CHECK_THROWS_AS (simulate_tracking (t, cfg, params), DivergenceError);
}

TEST_CASE ("evaluation sample selection")
{
    const auto all = evaluation_indices (10, 0);
    CHECK (all.size () == 10);
    const auto some = evaluation_indices (1001, 50);
    REQUIRE (some.size () == 50);
    CHECK (some.front () == 0);
    CHECK (some.back () == 1000);
    for (std::size_t i = 1; i < some.size (); ++i)
        CHECK (some[i] > some[i - 1]);
    CHECK (evaluation_indices (5, 50).size () == 5);
}

TEST_CASE ("rank correlation")
{
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> up{10, 20, 30, 40, 50}, down{5, 4, 3, 2, 1};
    CHECK (rank_correlation (a, up) == doctest::Approx (1.0));
    CHECK (rank_correlation (a, down) == doctest::Approx (-1.0));
    // ties share the average rank: ranks (1, 2.5, 2.5, 4) against (1, 2, 3, 4)
    const std::vector<double> tied{1, 2, 2, 3}, plain{1, 2, 3, 4};
    CHECK (rank_correlation (tied, plain) == doctest::Approx (0.9486832980505138));
    const std::vector<double> short_a{1.0}, short_b{1.0};
    CHECK_THROWS (rank_correlation (short_a, up));
}

TEST_CASE ("controller settings are validated")
{
    PurePursuitConfig cfg;
    cfg.base_lookahead = 0.0;
    CHECK_THROWS (cfg.validate ());
    cfg = {};
    cfg.speed_gain = -1.0;
    CHECK_THROWS (cfg.validate ());
}
