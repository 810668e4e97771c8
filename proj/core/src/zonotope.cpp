#include <overtake/zonotope.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <overtake/errors.hpp>
#include <overtake/lp.hpp>

namespace overtake
{

Zonotope::Zonotope (Eigen::VectorXd center, Eigen::MatrixXd generators)
    : center_ (std::move (center)), generators_ (std::move (generators))
{
    if (generators_.cols () > 0 && generators_.rows () != center_.size ())
        throw PreconditionError ("Zonotope: generator dimension does not match the center");
    if (generators_.cols () == 0)
        generators_.resize (center_.size (), 0);
}

Zonotope Zonotope::point (const Eigen::VectorXd &c) { return Zonotope (c, Eigen::MatrixXd (c.size (), 0)); }

Zonotope Zonotope::box (const Eigen::VectorXd &center, const Eigen::VectorXd &radius)
{
    if ((radius.array () < 0.0).any ())
        throw PreconditionError ("Zonotope::box: negative radius");
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < radius.size (); ++i)
        if (radius (i) > 0.0)
            keep.push_back (i);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero (center.size (), static_cast<Eigen::Index> (keep.size ()));
    for (std::size_t k = 0; k < keep.size (); ++k)
        g (keep[k], static_cast<Eigen::Index> (k)) = radius (keep[k]);
    return Zonotope (center, std::move (g));
}

Eigen::VectorXd Zonotope::radius () const
{
    if (generators_.cols () == 0)
        return Eigen::VectorXd::Zero (center_.size ());
    return generators_.cwiseAbs ().rowwise ().sum ();
}

double Zonotope::support (const Eigen::VectorXd &d) const
{
    return center_.dot (d) + (generators_.transpose () * d).cwiseAbs ().sum ();
}

Zonotope Zonotope::linear_map (const Eigen::MatrixXd &M) const
{
    if (M.cols () != dim ())
        throw PreconditionError ("Zonotope::linear_map: dimension mismatch");
    return Zonotope (M * center_, M * generators_);
}

Zonotope Zonotope::translate (const Eigen::VectorXd &v) const { return Zonotope (center_ + v, generators_); }

Zonotope Zonotope::operator+ (const Zonotope &other) const
{
    if (other.dim () != dim ())
        throw PreconditionError ("Zonotope: Minkowski sum of different dimensions");
    Eigen::MatrixXd g (dim (), generator_count () + other.generator_count ());
    g << generators_, other.generators_;
    return Zonotope (center_ + other.center_, std::move (g));
}

Zonotope Zonotope::reduce (std::size_t max_generators) const
{
    const auto n = static_cast<std::size_t> (dim ());
    const auto m = static_cast<std::size_t> (generator_count ());
    if (m <= max_generators)
        return *this;
    const std::size_t keep = max_generators > n ? max_generators - n : 0;
    std::vector<Eigen::Index> order (m);
    std::iota (order.begin (), order.end (), Eigen::Index{0});
    // largest first; ties by index keep the result deterministic
    std::stable_sort (order.begin (), order.end (), [&] (Eigen::Index a, Eigen::Index b) {
        return generators_.col (a).norm () > generators_.col (b).norm ();
    });
    Eigen::VectorXd boxed = Eigen::VectorXd::Zero (dim ());
    for (std::size_t k = keep; k < m; ++k)
        boxed += generators_.col (order[k]).cwiseAbs ();
    std::sort (order.begin (), order.begin () + static_cast<std::ptrdiff_t> (keep));
    Eigen::MatrixXd g (dim (), static_cast<Eigen::Index> (keep));
    for (std::size_t k = 0; k < keep; ++k)
        g.col (static_cast<Eigen::Index> (k)) = generators_.col (order[k]);
    return Zonotope (center_, std::move (g)) + box (Eigen::VectorXd::Zero (dim ()), boxed);
}

Zonotope Zonotope::compact () const
{
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < generator_count (); ++j)
        if (generators_.col (j).cwiseAbs ().maxCoeff () > 0.0)
            keep.push_back (j);
    Eigen::MatrixXd g (dim (), static_cast<Eigen::Index> (keep.size ()));
    for (std::size_t k = 0; k < keep.size (); ++k)
        g.col (static_cast<Eigen::Index> (k)) = generators_.col (keep[k]);
    return Zonotope (center_, std::move (g));
}

Zonotope Zonotope::augment (double value) const
{
    Eigen::VectorXd c (dim () + 1);
    c << center_, value;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero (dim () + 1, generator_count ());
    g.topRows (dim ()) = generators_;
    return Zonotope (std::move (c), std::move (g));
}

Zonotope Zonotope::project (Eigen::Index n) const
{
    return Zonotope (center_.head (n), generators_.topRows (n));
}

IntervalMatrix::IntervalMatrix (Eigen::MatrixXd lo, Eigen::MatrixXd hi) : lower (std::move (lo)), upper (std::move (hi))
{
    if (lower.rows () != upper.rows () || lower.cols () != upper.cols ())
        throw PreconditionError ("IntervalMatrix: bound shapes differ");
    if ((lower.array () > upper.array ()).any ())
        throw PreconditionError ("IntervalMatrix: lower bound exceeds upper bound");
}

IntervalMatrix IntervalMatrix::symmetric (const Eigen::MatrixXd &r) { return IntervalMatrix (-r.cwiseAbs (), r.cwiseAbs ()); }

Zonotope operator* (const IntervalMatrix &I, const Zonotope &Z)
{
    const Eigen::VectorXd spread = I.radius () * (Z.center ().cwiseAbs () + Z.radius ());
    return Z.linear_map (I.center ()) + Zonotope::box (Eigen::VectorXd::Zero (I.lower.rows ()), spread);
}

Zonotope hull_enclosure (const Zonotope &a, const Zonotope &b)
{
    if (a.dim () != b.dim () || a.generator_count () != b.generator_count ())
        throw PreconditionError ("hull_enclosure: zonotopes must share dimension and generator count");
    const Eigen::Index m = a.generator_count ();
    Eigen::MatrixXd g (a.dim (), 2 * m + 1);
    g.leftCols (m) = 0.5 * (a.generators () + b.generators ());
    g.middleCols (m, m) = 0.5 * (a.generators () - b.generators ());
    g.col (2 * m) = 0.5 * (a.center () - b.center ());
    return Zonotope (0.5 * (a.center () + b.center ()), std::move (g)).compact ();
}

double zonotope_norm (const Zonotope &z, const Eigen::VectorXd &p)
{
    if (p.size () != z.dim ())
        throw PreconditionError ("zonotope_norm: dimension mismatch");
    const Eigen::Index n = z.dim (), m = z.generator_count ();
    const Eigen::VectorXd d = p - z.center ();
    if (m == 0)
        return d.cwiseAbs ().maxCoeff () <= 1e-12 * (1.0 + z.center ().cwiseAbs ().maxCoeff ())
                   ? 0.0
                   : std::numeric_limits<double>::infinity ();
    // variables: beta+ (m), beta- (m), t, slack (m)
    const Eigen::Index nv = 3 * m + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero (n + m, nv);
    Eigen::VectorXd b = Eigen::VectorXd::Zero (n + m);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double scale = std::max (z.generators ().row (i).cwiseAbs ().maxCoeff (), std::abs (d (i)));
        const double s = scale > 0.0 ? 1.0 / scale : 1.0;
        A.block (i, 0, 1, m) = s * z.generators ().row (i);
        A.block (i, m, 1, m) = -s * z.generators ().row (i);
        b (i) = s * d (i);
    }
    for (Eigen::Index k = 0; k < m; ++k)
    {
        A (n + k, k) = 1.0;
        A (n + k, m + k) = 1.0;
        A (n + k, 2 * m) = -1.0;
        A (n + k, 2 * m + 1 + k) = 1.0;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero (nv);
    c (2 * m) = 1.0;
    const LpResult res = solve_standard_lp (c, A, b);
    if (res.status != LpResult::Status::optimal)
        return std::numeric_limits<double>::infinity ();
    return res.objective;
}

bool zonotope_contains (const Zonotope &z, const Eigen::VectorXd &p, double tol)
{
    if (p.size () != z.dim ())
        throw PreconditionError ("zonotope_contains: dimension mismatch");
    const Eigen::VectorXd r = z.radius ();
    for (Eigen::Index i = 0; i < p.size (); ++i)
        if (std::abs (p (i) - z.center () (i)) > r (i) * (1.0 + tol) + 1e-12 * (1.0 + std::abs (z.center () (i))))
            return false;
    return zonotope_norm (z, p) <= 1.0 + tol;
}

} // namespace overtake
