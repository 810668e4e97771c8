#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include <overtake/errors.hpp>
#include <overtake/geometry.hpp>
#include <overtake/math.hpp>

#include "generators.hpp"

using namespace overtake;
using testsupport::Rng;

TEST_CASE ("centerline samples are ordered and densely spaced")
{
    const std::vector<CenterlinePiece> pieces{{20.0, 0.0}, {15.0, 0.05}, {10.0, -0.1}};
    const Centerline line = Centerline::from_pieces (pieces, 0.5);
    const auto &s = line.samples ();
    CHECK (s.front ().s == 0.0);
    CHECK (line.total_length () == doctest::Approx (45.0));
    for (std::size_t i = 1; i < s.size (); ++i)
    {
        CHECK (s[i].s > s[i - 1].s);
        CHECK (std::hypot (s[i].x - s[i - 1].x, s[i].y - s[i - 1].y) <= 0.5 + 1e-12);
    }
}

TEST_CASE ("frenet_to_cartesian on a straight line")
{
    const Centerline line = Centerline::straight (50.0);
    const Eigen::Vector2d a = frenet_to_cartesian ({5.0, 0.0}, line);
    CHECK (a.x () == doctest::Approx (5.0));
    CHECK (a.y () == doctest::Approx (0.0));
    const Eigen::Vector2d b = frenet_to_cartesian ({5.0, 2.0}, line);
    CHECK (b.x () == doctest::Approx (5.0));
    CHECK (b.y () == doctest::Approx (2.0));
    CHECK_THROWS_AS (frenet_to_cartesian ({60.0, 0.0}, line), DomainError);
    CHECK_THROWS_AS (frenet_to_cartesian ({-1.0, 0.0}, line), DomainError);
}

TEST_CASE ("frenet_to_cartesian on a quarter circle matches the analytic arc")
{
    const double R = 10.0;
    const Centerline line = Centerline::arc (R, std::numbers::pi / 2.0);
    // left turn from the origin heading +x: arc center at (0, R)
    const Eigen::Vector2d p = frenet_to_cartesian ({5.0 * std::numbers::pi, 1.0}, line);
    CHECK ((p - Eigen::Vector2d (0.0, R)).norm () == doctest::Approx (9.0).epsilon (1e-9));
    CHECK (p.x () == doctest::Approx (9.0).epsilon (1e-9));
    CHECK (p.y () == doctest::Approx (10.0).epsilon (1e-9));

    for (const double s : {1.0, 4.0, 9.5, 12.0})
    {
        const double phi = s / R;
        const Eigen::Vector2d q = frenet_to_cartesian ({s, -0.7}, line);
        const Eigen::Vector2d expect = Eigen::Vector2d (0.0, R) + (R + 0.7) * Eigen::Vector2d (std::sin (phi), -std::cos (phi));
        CHECK ((q - expect).norm () < 1e-9);
    }
}

TEST_CASE ("cartesian_to_frenet on a straight line")
{
    const Centerline line = Centerline::straight (50.0);
    const FrenetPose a = cartesian_to_frenet (5.0, 0.0, line).pose;
    CHECK (a.s == doctest::Approx (5.0));
    CHECK (a.l == doctest::Approx (0.0));
    const FrenetPose b = cartesian_to_frenet (5.0, -1.5, line).pose;
    CHECK (b.s == doctest::Approx (5.0));
    CHECK (b.l == doctest::Approx (-1.5));
}

TEST_CASE ("property: frenet round trip on random centerlines")
{
    Rng rng (11);
    for (int trial = 0; trial < 30; ++trial)
    {
        std::vector<CenterlinePiece> pieces;
        double min_radius = 1e9;
        for (int i = 0; i < 3; ++i)
        {
            const double k = rng.uniform (-0.05, 0.05);
            pieces.push_back ({rng.uniform (10.0, 30.0), k});
            if (std::abs (k) > 1e-12)
                min_radius = std::min (min_radius, 1.0 / std::abs (k));
        }
        const Centerline line = Centerline::from_pieces (pieces, 0.5, {rng.uniform (-5, 5), rng.uniform (-5, 5), 0.0,
                                                                      rng.uniform (-3, 3)});
        for (int j = 0; j < 40; ++j)
        {
            const FrenetPose pose{rng.uniform (1.0, line.total_length () - 1.0),
                                  rng.uniform (-1.0, 1.0) * std::min (3.6, 0.5 * min_radius)};
            const Eigen::Vector2d xy = frenet_to_cartesian (pose, line);
            const FrenetPose back = cartesian_to_frenet (xy.x (), xy.y (), line).pose;
            const Eigen::Vector2d again = frenet_to_cartesian (back, line);
            CHECK ((again - xy).norm () < 1e-6);
            CHECK (back.s == doctest::Approx (pose.s).epsilon (1e-6));
            CHECK (back.l == doctest::Approx (pose.l).epsilon (1e-6));
        }
    }
}

TEST_CASE ("polyline centerline follows its waypoints")
{
    const std::vector<Eigen::Vector2d> pts{{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}};
    const Centerline line = Centerline::from_waypoints (pts, 0.5);
    CHECK (line.total_length () == doctest::Approx (20.0));
    const Eigen::Vector2d p = frenet_to_cartesian ({15.0, 0.0}, line);
    CHECK (p.x () == doctest::Approx (10.0));
    CHECK (p.y () == doctest::Approx (5.0));
}

TEST_CASE ("obstacle pose interpolation")
{
    const ObstacleTrajectory obs ({{0.0, 0.0, 0.0, 0.0}, {1.0, 10.0, 0.0, 0.0}}, 4.3, 1.9);
    const auto mid = obs.pose_at (0.5);
    CHECK (mid.pose.x == doctest::Approx (5.0));
    CHECK (mid.pose.y == doctest::Approx (0.0));
    CHECK (mid.pose.heading == doctest::Approx (0.0));
    CHECK_FALSE (mid.clamped);
    const auto start = obs.pose_at (0.0);
    CHECK (start.pose.x == 0.0);
    CHECK (start.pose.y == 0.0);
    CHECK (obs.pose_at (3.0).clamped);
    CHECK (obs.pose_at (3.0).pose.x == doctest::Approx (10.0));
}

TEST_CASE ("property: heading interpolation takes the shortest arc across the wrap")
{
    Rng rng (12);
    for (int i = 0; i < 200; ++i)
    {
        const double h0 = rng.uniform (-kPi, kPi), h1 = rng.uniform (-kPi, kPi), w = rng.uniform (0.0, 1.0);
        const ObstacleTrajectory obs ({{0.0, 0.0, 0.0, h0}, {1.0, 1.0, 0.0, h1}}, 4.3, 1.9);
        // oracle: rotate the first unit vector toward the second through the smaller angle
        const double sweep = std::atan2 (std::sin (h1 - h0), std::cos (h1 - h0));
        const double expect = h0 + w * sweep;
        const double got = obs.pose_at (w).pose.heading;
        CHECK (std::abs (std::sin (got - expect)) < 1e-9);
        CHECK (std::cos (got - expect) > 0.0);
    }
    const ObstacleTrajectory wrap ({{0.0, 0.0, 0.0, 3.0}, {1.0, 0.0, 0.0, -3.0}}, 4.3, 1.9);
    CHECK (std::abs (angle_diff (kPi, wrap.pose_at (0.5).pose.heading)) < 1e-9);
}

TEST_CASE ("rectangle distances")
{
    const OrientedRect a{0.0, 0.0, 0.0, 2.0, 1.0};
    CHECK (point_rect_distance ({0.5, 0.5}, a) == 0.0);
    CHECK (point_rect_distance ({5.0, 0.0}, a) == doctest::Approx (3.0));
    CHECK (point_rect_distance ({5.0, 5.0}, a) == doctest::Approx (5.0));
    const OrientedRect b{7.0, 0.0, 0.0, 2.0, 1.0};
    CHECK (rect_distance (a, b) == doctest::Approx (3.0));
    const OrientedRect touching{4.0, 0.0, 0.0, 2.0, 1.0};
    CHECK (rect_distance (a, touching) == doctest::Approx (0.0));
    const OrientedRect rotated{0.0, 5.0, kPi / 4.0, 1.0, 1.0};
    // the rotated square's lowest corner sits sqrt(2) below its center
    CHECK (rect_distance (a, rotated) == doctest::Approx (5.0 - std::sqrt (2.0) - 1.0));
}

TEST_CASE ("segment visibility")
{
    const Centerline line = Centerline::straight (100.0);
    VisibilityParams vis;
    CHECK (segment_visible ({10.0, 0.0, 0.0}, {30.0, 0.0, 2.0}, {}, line, vis));

    const std::vector<ObstacleTrajectory> parked{testsupport::parked (20.0, 0.0)};
    CHECK_FALSE (segment_visible ({10.0, 0.0, 0.0}, {30.0, 0.0, 2.0}, parked, line, vis));
    CHECK (segment_visible ({10.0, 3.5, 0.0}, {30.0, 3.5, 2.0}, parked, line, vis));

    // a vehicle crossing the road at x = 20 is gone by the time the ego gets there
    const std::vector<ObstacleTrajectory> crossing{
        ObstacleTrajectory ({{0.0, 20.0, -10.0, kPi / 2.0}, {1.0, 20.0, 0.0, kPi / 2.0}, {2.0, 20.0, 10.0, kPi / 2.0}},
                            4.3, 1.9)};
    CHECK (segment_visible ({0.0, 0.0, 0.0}, {40.0, 0.0, 4.0}, crossing, line, vis));
    // the same spatial path taken one second earlier meets it
    CHECK_FALSE (segment_visible ({10.0, 0.0, 0.0}, {30.0, 0.0, 2.0}, crossing, line, vis));
}

TEST_CASE ("property: segment visibility is monotone in the margin")
{
    const Centerline line = Centerline::straight (100.0);
    Rng rng (13);
    int visible_count = 0;
    for (int i = 0; i < 300; ++i)
    {
        std::vector<ObstacleTrajectory> obs;
        for (int o = 0; o < 2; ++o)
        {
            const double x0 = rng.uniform (10.0, 80.0), y0 = rng.uniform (-3.0, 3.0), v = rng.uniform (-5.0, 5.0);
            obs.push_back (ObstacleTrajectory ({{0.0, x0, y0, 0.0}, {5.0, x0 + 5.0 * v, y0, 0.0}}, 4.3, 1.9));
        }
        const SltPoint a{rng.uniform (0.0, 50.0), rng.uniform (-3.0, 3.0), rng.uniform (0.0, 2.0)};
        const SltPoint b{a.s + rng.uniform (1.0, 30.0), rng.uniform (-3.0, 3.0), a.t + rng.uniform (0.5, 3.0)};
        VisibilityParams big, small;
        big.margin = rng.uniform (0.0, 1.0);
        small.margin = big.margin * rng.uniform (0.0, 1.0);
        if (segment_visible (a, b, obs, line, big))
        {
            ++visible_count;
            CHECK (segment_visible (a, b, obs, line, small));
        }
    }
    CHECK (visible_count > 20);
}

TEST_CASE ("min_obstacle_distance")
{
    const PolynomialTrajectory traj = testsupport::straight_trajectory (10.0, 4.0);
    const Footprint ego;

    const ObstacleDistance none = min_obstacle_distance (traj, {}, ego, 0.1);
    CHECK (std::isinf (none.d_min));
    CHECK (none.close_ratio == 0.0);

    SUBCASE ("parallel pass with known clearance")
    {
        const std::vector<ObstacleTrajectory> obs{testsupport::parked (20.0, 1.9 + 0.331)};
        const ObstacleDistance d = min_obstacle_distance (traj, obs, ego, 0.1);
        CHECK (d.d_min == doctest::Approx (0.331).epsilon (1e-6));
        CHECK (d.close_ratio == 0.0);
    }
    SUBCASE ("grazing pass against a dense sampling oracle")
    {
        const std::vector<ObstacleTrajectory> obs{testsupport::parked (20.0, 1.9 + 0.05)};
        const ObstacleDistance d = min_obstacle_distance (traj, obs, ego, 0.1);
        // oracle: 1 ms footprint sampling, speed is constant so time fraction equals arc-length fraction
        int close = 0, total = 0;
        double dmin = 1e9;
        for (double t = 0.0005; t < 4.0; t += 0.001, ++total)
        {
            const OrientedRect e{10.0 * t, 0.0, 0.0, 0.5 * ego.length, 0.5 * ego.width};
            const double dist = rect_distance (e, footprint_at (obs[0], t));
            dmin = std::min (dmin, dist);
            close += dist < 0.1;
        }
        CHECK (d.d_min == doctest::Approx (dmin).epsilon (1e-6));
        CHECK (d.close_ratio == doctest::Approx (static_cast<double> (close) / total).epsilon (0.01));
        CHECK (d.close_ratio > 0.2);
    }
}

TEST_CASE ("property: obstacle distance converges with the sampling step")
{
    Rng rng (14);
    const Footprint ego;
    for (int i = 0; i < 20; ++i)
    {
        const PolynomialTrajectory traj = testsupport::random_smooth_trajectory (rng, 4.0, 4);
        const Eigen::Vector2d mid = traj.position (2.0);
        const std::vector<ObstacleTrajectory> obs{
            testsupport::parked (mid.x () + rng.uniform (-6.0, 6.0), mid.y () + rng.uniform (-6.0, 6.0))};
        const double coarse = min_obstacle_distance (traj, obs, ego, 0.1, 0.01).d_min;
        const double fine = min_obstacle_distance (traj, obs, ego, 0.1, 0.005).d_min;
        CHECK (std::abs (coarse - fine) < 0.01);
    }
}
