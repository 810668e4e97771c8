#include <cmath>
#include <vector>

#include <doctest.h>

#include <overtake/errors.hpp>
#include <overtake/polynomial.hpp>
#include <overtake/traj_fit.hpp>

#include "generators.hpp"

using namespace overtake;
using testsupport::Rng;

namespace
{

const std::vector<double> kGrid{0.0, 0.005, 0.01, 0.015, 0.025, 0.05, 0.1};

/// Composite Simpson rule with `n` (even) panels.
template <class F> double simpson (double a, double b, int n, F &&f)
{
    const double h = (b - a) / n;
    double sum = f (a) + f (b);
    for (int i = 1; i < n; ++i)
        sum += (i % 2 ? 4.0 : 2.0) * f (a + h * i);
    return sum * h / 3.0;
}

Skeleton curved_skeleton ()
{
    Skeleton sk;
    const double pts[][3] = {{0, 0, 0}, {10, 0, 1}, {20, 2.7, 2}, {30, 3.6, 3}, {40, 3.6, 4}};
    for (std::size_t i = 0; i < 5; ++i)
    {
        SkeletonNode n;
        n.id = i;
        n.s = n.x = pts[i][0];
        n.l = n.y = pts[i][1];
        n.t = pts[i][2];
        sk.nodes.push_back (n);
    }
    return sk;
}

} // namespace

TEST_CASE ("hermite quintic meets its boundary data")
{
    Rng rng (31);
    for (int i = 0; i < 50; ++i)
    {
        const double p0 = rng.uniform (-5, 5), v0 = rng.uniform (-5, 5), a0 = rng.uniform (-5, 5);
        const double p1 = rng.uniform (-5, 5), v1 = rng.uniform (-5, 5), a1 = rng.uniform (-5, 5);
        const double h = rng.uniform (0.2, 3.0);
        const Quintic q = hermite_quintic (p0, v0, a0, p1, v1, a1, h);
        CHECK (quintic_derivative (q, 0.0, 0) == doctest::Approx (p0));
        CHECK (quintic_derivative (q, 0.0, 1) == doctest::Approx (v0));
        CHECK (quintic_derivative (q, 0.0, 2) == doctest::Approx (a0));
        CHECK (quintic_derivative (q, h, 0) == doctest::Approx (p1));
        CHECK (quintic_derivative (q, h, 1) == doctest::Approx (v1));
        CHECK (quintic_derivative (q, h, 2) == doctest::Approx (a1));
    }
}

TEST_CASE ("property: exact jerk integral agrees with quadrature and the Gram matrix")
{
    Rng rng (32);
    for (int i = 0; i < 50; ++i)
    {
        Quintic q;
        for (double &c : q)
            c = rng.uniform (-3.0, 3.0);
        const double h = rng.uniform (0.3, 2.5);
        const double quad = simpson (0.0, h, 400, [&] (double t) {
            const double j = quintic_derivative (q, t, 3);
            return j * j;
        });
        CHECK (quintic_jerk_integral (q, h) == doctest::Approx (quad).epsilon (1e-8));
        Eigen::Matrix<double, 6, 1> c;
        for (int k = 0; k < 6; ++k)
            c (k) = q[static_cast<std::size_t> (k)];
        CHECK ((c.transpose () * jerk_gram (h) * c) (0) == doctest::Approx (quad).epsilon (1e-8));
    }
}

TEST_CASE ("trajectory evaluation clamps outside the horizon")
{
    const PolynomialTrajectory t = testsupport::straight_trajectory (10.0, 2.0);
    CHECK (t.position (-1.0).x () == doctest::Approx (0.0));
    CHECK (t.position (5.0).x () == doctest::Approx (20.0));
    CHECK (t.arc_length () == doctest::Approx (20.0));
    CHECK (t.jerk_integral () == doctest::Approx (0.0));
}

TEST_CASE ("fidelity-only fit recovers a curve that is already piecewise quintic")
{
    Rng rng (33);
    const PolynomialTrajectory truth = testsupport::random_smooth_trajectory (rng, 4.0, 4);
    FitReference ref;
    ref.knots.assign (truth.knots ().begin (), truth.knots ().end ());
    ref.target = [&] (double t) { return truth.position (t); };
    ref.start = {truth.derivative (0.0, 0), truth.derivative (0.0, 1), truth.derivative (0.0, 2)};
    ref.end = {truth.derivative (4.0, 0), truth.derivative (4.0, 1), truth.derivative (4.0, 2)};
    const PolynomialTrajectory fit = fit_reference (ref, FitWeights::from_ratio (0.0));
    for (std::size_t s = 0; s < truth.segment_count (); ++s)
        for (std::size_t k = 0; k < 6; ++k)
        {
            CHECK (fit.x_coeffs (s)[k] == doctest::Approx (truth.x_coeffs (s)[k]).epsilon (1e-6).scale (1.0));
            CHECK (fit.y_coeffs (s)[k] == doctest::Approx (truth.y_coeffs (s)[k]).epsilon (1e-6).scale (1.0));
        }
    CHECK (fit_objective (fit, ref, FitWeights::from_ratio (0.0)).fidelity < 1e-12);
}

TEST_CASE ("straight constant-speed skeleton fits a straight constant-speed trajectory")
{
    Skeleton sk;
    for (int i = 0; i < 4; ++i)
    {
        SkeletonNode n;
        n.id = static_cast<std::size_t> (i);
        n.s = n.x = 10.0 * i;
        n.t = i;
        sk.nodes.push_back (n);
    }
    for (const double r : kGrid)
    {
        const PolynomialTrajectory t = fit_skeleton (sk, FitWeights::from_ratio (r));
        for (double tt = 0.0; tt <= 3.0; tt += 0.1)
        {
            CHECK (t.position (tt).x () == doctest::Approx (10.0 * tt));
            CHECK (std::abs (t.position (tt).y ()) < 1e-9);
            CHECK (t.derivative (tt, 1).x () == doctest::Approx (10.0));
        }
        CHECK (t.jerk_integral () < 1e-9);
    }
}

TEST_CASE ("curved skeleton: jerk falls and fidelity rises with r_alpha")
{
    const Skeleton sk = curved_skeleton ();
    const FitReference ref = skeleton_reference (sk);
    auto oracle = [&] (const PolynomialTrajectory &t) {
        // independent dense Simpson quadrature of both objective terms, ten times the fit's sampling
        double fid = 0.0, jerk = 0.0;
        const auto knots = t.knots ();
        for (std::size_t i = 0; i + 1 < knots.size (); ++i)
        {
            // evaluate just inside the segment so interior knots use the correct piece
            const double a = knots[i], b = knots[i + 1];
            fid += simpson (a, b, 80, [&] (double x) { return (t.position (x) - ref.target (x)).squaredNorm (); });
            jerk += simpson (a, b, 80, [&] (double x) {
                const double xi = std::clamp (x, a + 1e-12, b - 1e-12);
                const Quintic &cx = t.x_coeffs (i), &cy = t.y_coeffs (i);
                const double jx = quintic_derivative (cx, xi - a, 3), jy = quintic_derivative (cy, xi - a, 3);
                return jx * jx + jy * jy;
            });
        }
        return std::pair{fid, jerk};
    };
    const auto lo = fit_skeleton (sk, FitWeights::from_ratio (0.005));
    const auto hi = fit_skeleton (sk, FitWeights::from_ratio (0.1));
    const FitObjective olo = fit_objective (lo, ref, FitWeights::from_ratio (0.005));
    const FitObjective ohi = fit_objective (hi, ref, FitWeights::from_ratio (0.1));
    const auto [fid_lo, jerk_lo] = oracle (lo);
    const auto [fid_hi, jerk_hi] = oracle (hi);
    CHECK (olo.fidelity == doctest::Approx (fid_lo).epsilon (1e-6));
    CHECK (olo.jerk == doctest::Approx (jerk_lo).epsilon (1e-6));
    CHECK (ohi.fidelity == doctest::Approx (fid_hi).epsilon (1e-6));
    CHECK (ohi.jerk == doctest::Approx (jerk_hi).epsilon (1e-6));
    CHECK (jerk_hi < jerk_lo);
    CHECK (fid_hi > fid_lo);
    CHECK (olo.total == doctest::Approx (olo.fidelity + 0.005 * olo.jerk));
}

TEST_CASE ("property: boundary constraints, C2 continuity and the monotone trade-off")
{
    Rng rng (34);
    for (int trial = 0; trial < 40; ++trial)
    {
        const Skeleton sk = testsupport::random_skeleton (rng, static_cast<std::size_t> (rng.integer (2, 7)),
                                                          rng.uniform (4.0, 14.0));
        const FitReference ref = skeleton_reference (sk);
        double prev_jerk = std::numeric_limits<double>::infinity (), prev_fid = -1.0;
        for (const double r : kGrid)
        {
            const FitWeights w = FitWeights::from_ratio (r);
            const PolynomialTrajectory t = fit_reference (ref, w);
            const double T = t.duration ();
            CHECK ((t.derivative (0.0, 0) - ref.start.position).norm () < 1e-9);
            CHECK ((t.derivative (0.0, 1) - ref.start.velocity).norm () < 1e-9);
            CHECK ((t.derivative (0.0, 2) - ref.start.acceleration).norm () < 1e-9);
            CHECK ((t.derivative (T, 0) - ref.end.position).norm () < 1e-9);
            CHECK ((t.derivative (T, 1) - ref.end.velocity).norm () < 1e-9);
            CHECK ((t.derivative (T, 2) - ref.end.acceleration).norm () < 1e-9);
            const auto knots = t.knots ();
            for (std::size_t i = 1; i + 1 < knots.size (); ++i)
            {
                const double h = knots[i] - knots[i - 1];
                for (int order = 0; order < 3; ++order)
                {
                    const double left_x = quintic_derivative (t.x_coeffs (i - 1), h, order);
                    const double right_x = quintic_derivative (t.x_coeffs (i), 0.0, order);
                    const double left_y = quintic_derivative (t.y_coeffs (i - 1), h, order);
                    const double right_y = quintic_derivative (t.y_coeffs (i), 0.0, order);
                    CHECK (std::abs (left_x - right_x) < 1e-9 * std::max (1.0, std::abs (left_x)));
                    CHECK (std::abs (left_y - right_y) < 1e-9 * std::max (1.0, std::abs (left_y)));
                }
            }
            const FitObjective o = fit_objective (t, ref, w);
            CHECK (o.jerk <= prev_jerk * (1.0 + 1e-9) + 1e-9);
            CHECK (o.fidelity >= prev_fid * (1.0 - 1e-9) - 1e-9);
            prev_jerk = o.jerk;
            prev_fid = o.fidelity;
        }
    }
}

TEST_CASE ("candidate generation over the grid")
{
    const Skeleton sk = curved_skeleton ();
    const auto all = generate_candidates (sk, kGrid);
    REQUIRE (all.size () == 7);
    for (std::size_t i = 0; i < all.size (); ++i)
    {
        CHECK (all[i].r_alpha == kGrid[i]);
        CHECK (all[i].trajectory.has_value ());
        CHECK (all[i].error.empty ());
    }
    const std::vector<double> single{0.0};
    const auto one = generate_candidates (sk, single);
    REQUIRE (one.size () == 1);
    CHECK (*one[0].trajectory == fit_skeleton (sk, FitWeights::from_ratio (0.0)));

    const std::vector<double> dup{0.01, 0.01, 0.05, 0.01};
    const auto d = generate_candidates (sk, dup, 3);
    CHECK (*d[0].trajectory == *d[1].trajectory);
    CHECK (*d[0].trajectory == *d[3].trajectory);
    const auto serial = generate_candidates (sk, kGrid, 1), threaded = generate_candidates (sk, kGrid, 4);
    for (std::size_t i = 0; i < serial.size (); ++i)
        CHECK (*serial[i].trajectory == *threaded[i].trajectory);
}

TEST_CASE ("degenerate knots are rejected")
{
    Skeleton sk = curved_skeleton ();
    sk.nodes[2].t = sk.nodes[1].t;
    CHECK_THROWS_AS (fit_skeleton (sk, FitWeights::from_ratio (0.01)), IllConditionedError);
    const auto c = generate_candidates (sk, kGrid);
    for (const auto &cand : c)
    {
        CHECK_FALSE (cand.trajectory.has_value ());
        CHECK_FALSE (cand.error.empty ());
    }
    CHECK_THROWS (FitWeights{0.0, 1.0}.validate ());
}
