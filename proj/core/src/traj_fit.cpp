#include <overtake/traj_fit.hpp>

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <overtake/errors.hpp>
#include <overtake/parallel.hpp>
#include <overtake/quadrature.hpp>

namespace overtake
{

namespace
{

constexpr double kMinKnotGap = 1e-9;
constexpr double kMaxCondition = 1e12;

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

Vec6 monomials (double tau)
{
    Vec6 m;
    m (0) = 1.0;
    for (int k = 1; k < 6; ++k)
        m (k) = m (k - 1) * tau;
    return m;
}

} // namespace

void FitWeights::validate () const
{
    if (!(fidelity > 0.0))
        throw ValidationError ("fit.alpha1", "must be positive");
    if (!(jerk >= 0.0))
        throw ValidationError ("fit.r_alpha", "must be non-negative");
}

FitReference skeleton_reference (const Skeleton &skeleton)
{
    const auto &n = skeleton.nodes;
    if (n.size () < 2)
        throw PreconditionError ("skeleton_reference: skeleton needs at least two nodes");
    FitReference ref;
    std::vector<Eigen::Vector2d> pts;
    const double t0 = n.front ().t;
    for (const auto &node : n)
    {
        ref.knots.push_back (node.t - t0);
        pts.emplace_back (node.x, node.y);
    }
    const auto knots = ref.knots;
    ref.target = [knots, pts] (double t) -> Eigen::Vector2d {
        if (t <= knots.front ())
            return pts.front ();
        if (t >= knots.back ())
            return pts.back ();
        const auto it = std::upper_bound (knots.begin (), knots.end (), t);
        const auto i = static_cast<std::size_t> (it - knots.begin ()) - 1;
        const double w = (t - knots[i]) / (knots[i + 1] - knots[i]);
        return (1.0 - w) * pts[i] + w * pts[i + 1];
    };

    const std::size_t m = pts.size () - 1;
    auto slope = [&] (std::size_t i) { return Eigen::Vector2d ((pts[i + 1] - pts[i]) / (knots[i + 1] - knots[i])); };
    ref.start.position = pts.front ();
    ref.end.position = pts.back ();
    ref.start.velocity = slope (0);
    ref.end.velocity = slope (m - 1);
    if (m >= 2)
    {
        ref.start.acceleration = 2.0 * (slope (1) - slope (0)) / (knots[2] - knots[0]);
        ref.end.acceleration = 2.0 * (slope (m - 1) - slope (m - 2)) / (knots[m] - knots[m - 2]);
    }
    return ref;
}

PolynomialTrajectory fit_reference (const FitReference &ref, const FitWeights &weights)
{
    weights.validate ();
    const auto &knots = ref.knots;
    if (knots.size () < 2)
        throw PreconditionError ("fit_reference: need at least two knots");
    if (knots.front () != 0.0)
        throw PreconditionError ("fit_reference: first knot must be 0");
    for (std::size_t i = 0; i + 1 < knots.size (); ++i)
        if (!(knots[i + 1] - knots[i] > kMinKnotGap))
            throw IllConditionedError ("fit_reference: knot spacing " + std::to_string (knots[i + 1] - knots[i]) +
                                           " at segment " + std::to_string (i) + " is degenerate",
                                       std::numeric_limits<double>::infinity ());

    const std::size_t m = knots.size () - 1;
    const auto dim = static_cast<Eigen::Index> (3 * (m + 1));
    // Global quadratic in the knot data z = (p, v, a) per knot, one right-hand side per axis.
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero (dim, dim);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero (dim, 2);
    for (std::size_t i = 0; i < m; ++i)
    {
        const double h = knots[i + 1] - knots[i];
        const Mat6 H = hermite_basis (h);
        Mat6 M = Mat6::Zero ();
        Eigen::Matrix<double, 6, 2> b = Eigen::Matrix<double, 6, 2>::Zero ();
        const double half = 0.5 * h;
        for (std::size_t q = 0; q < GaussLegendre8::nodes.size (); ++q)
        {
            const double tau = half * (1.0 + GaussLegendre8::nodes[q]);
            const double w = half * GaussLegendre8::weights[q];
            const Vec6 phi = monomials (tau);
            M += w * phi * phi.transpose ();
            const Eigen::Vector2d r = ref.target (knots[i] + tau);
            b.col (0) += w * r.x () * phi;
            b.col (1) += w * r.y () * phi;
        }
        const Mat6 local = H.transpose () * (weights.fidelity * M + weights.jerk * jerk_gram (h)) * H;
        const auto off = static_cast<Eigen::Index> (3 * i);
        K.block<6, 6> (off, off) += local;
        g.block<6, 2> (off, 0) += weights.fidelity * H.transpose () * b;
    }

    Eigen::MatrixXd z (dim, 2);
    auto pin = [&] (Eigen::Index row, const BoundaryState &s) {
        z.row (row) = s.position.transpose ();
        z.row (row + 1) = s.velocity.transpose ();
        z.row (row + 2) = s.acceleration.transpose ();
    };
    pin (0, ref.start);
    pin (dim - 3, ref.end);

    const Eigen::Index nf = dim - 6;
    if (nf > 0)
    {
        Eigen::MatrixXd Kff = K.block (3, 3, nf, nf);
        Eigen::MatrixXd rhs = g.middleRows (3, nf) - K.block (3, 0, nf, 3) * z.topRows (3) -
                              K.block (3, dim - 3, nf, 3) * z.bottomRows (3);
        // Jacobi scaling keeps the condition estimate independent of the p/v/a units.
        const Eigen::VectorXd d = Kff.diagonal ().cwiseAbs ().cwiseMax (std::numeric_limits<double>::min ()).cwiseSqrt ().cwiseInverse ();
        const Eigen::MatrixXd S = d.asDiagonal () * Kff * d.asDiagonal ();
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> (S, Eigen::EigenvaluesOnly).eigenvalues ();
        const double cond = ev.minCoeff () > 0.0 ? ev.maxCoeff () / ev.minCoeff () : std::numeric_limits<double>::infinity ();
        if (!(cond < kMaxCondition))
            throw IllConditionedError ("fit_reference: normal system condition number " + std::to_string (cond), cond);
        const Eigen::LDLT<Eigen::MatrixXd> ldlt (S);
        z.middleRows (3, nf) = d.asDiagonal () * ldlt.solve (d.asDiagonal () * rhs);
    }

    std::vector<Quintic> xs, ys;
    for (std::size_t i = 0; i < m; ++i)
    {
        const double h = knots[i + 1] - knots[i];
        const Mat6 H = hermite_basis (h);
        const auto off = static_cast<Eigen::Index> (3 * i);
        const Vec6 cx = H * z.block<6, 1> (off, 0);
        const Vec6 cy = H * z.block<6, 1> (off, 1);
        Quintic qx{}, qy{};
        for (int k = 0; k < 6; ++k)
        {
            qx[static_cast<std::size_t> (k)] = cx (k);
            qy[static_cast<std::size_t> (k)] = cy (k);
        }
        xs.push_back (qx);
        ys.push_back (qy);
    }
    return PolynomialTrajectory (knots, std::move (xs), std::move (ys));
}

PolynomialTrajectory fit_skeleton (const Skeleton &skeleton, const FitWeights &weights)
{
    return fit_reference (skeleton_reference (skeleton), weights);
}

FitObjective fit_objective (const PolynomialTrajectory &traj, const FitReference &ref, const FitWeights &weights)
{
    FitObjective out;
    const auto knots = traj.knots ();
    for (std::size_t i = 0; i + 1 < knots.size (); ++i)
        out.fidelity += gauss_legendre (knots[i], knots[i + 1], [&] (double t) {
            const double tau = t - knots[i];
            const Eigen::Vector2d q (quintic_derivative (traj.x_coeffs (i), tau, 0),
                                     quintic_derivative (traj.y_coeffs (i), tau, 0));
            return (q - ref.target (t)).squaredNorm ();
        });
    out.jerk = traj.jerk_integral ();
    out.total = weights.fidelity * out.fidelity + weights.jerk * out.jerk;
    return out;
}

std::vector<CandidateFit> generate_candidates (const Skeleton &skeleton, std::span<const double> r_grid,
                                               std::size_t threads)
{
    if (r_grid.empty ())
        throw PreconditionError ("generate_candidates: empty r_alpha grid");
    for (const double r : r_grid)
        if (!(r >= 0.0))
            throw PreconditionError ("generate_candidates: r_alpha values must be non-negative");
    const FitReference ref = skeleton_reference (skeleton);
    std::vector<CandidateFit> out (r_grid.size ());
    parallel_for (r_grid.size (), threads, [&] (std::size_t i) {
        out[i].r_alpha = r_grid[i];
        try
        {
            out[i].trajectory = fit_reference (ref, FitWeights::from_ratio (r_grid[i]));
        }
        catch (const Error &e)
        {
            out[i].error = e.what ();
        }
    });
    return out;
}

} // namespace overtake
