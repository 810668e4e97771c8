#include <overtake/polynomial.hpp>

#include <algorithm>
#include <cmath>

#include <overtake/errors.hpp>
#include <overtake/quadrature.hpp>

namespace overtake
{

double quintic_derivative (const Quintic &c, double tau, int order)
{
    // falling-factorial weights k!/(k-order)!
    double value = 0.0;
    for (int k = 5; k >= order; --k)
    {
        double w = 1.0;
        for (int j = 0; j < order; ++j)
            w *= static_cast<double> (k - j);
        value = value * tau + w * c[static_cast<std::size_t> (k)];
    }
    return value;
}

Eigen::Matrix<double, 6, 6> hermite_basis (double h)
{
    const double h2 = h * h, h3 = h2 * h, h4 = h3 * h, h5 = h4 * h;
    Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero ();
    // columns: p0 v0 a0 p1 v1 a1
    m (0, 0) = 1.0;
    m (1, 1) = 1.0;
    m (2, 2) = 0.5;
    m.row (3) << -10.0 / h3, -6.0 / h2, -1.5 / h, 10.0 / h3, -4.0 / h2, 0.5 / h;
    m.row (4) << 15.0 / h4, 8.0 / h3, 1.5 / h2, -15.0 / h4, 7.0 / h3, -1.0 / h2;
    m.row (5) << -6.0 / h5, -3.0 / h4, -0.5 / h3, 6.0 / h5, -3.0 / h4, 0.5 / h3;
    return m;
}

Quintic hermite_quintic (double p0, double v0, double a0, double p1, double v1, double a1, double h)
{
    Eigen::Matrix<double, 6, 1> bnd;
    bnd << p0, v0, a0, p1, v1, a1;
    const Eigen::Matrix<double, 6, 1> c = hermite_basis (h) * bnd;
    Quintic out{};
    for (std::size_t k = 0; k < 6; ++k)
        out[k] = c (static_cast<Eigen::Index> (k));
    return out;
}

Eigen::Matrix<double, 6, 6> jerk_gram (double h)
{
    // c''' = 6 c3 + 24 c4 tau + 60 c5 tau^2
    const std::array<double, 3> w{6.0, 24.0, 60.0};
    Eigen::Matrix<double, 6, 6> g = Eigen::Matrix<double, 6, 6>::Zero ();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
        {
            const int p = i + j + 1;
            g (3 + i, 3 + j) = w[static_cast<std::size_t> (i)] * w[static_cast<std::size_t> (j)] *
                               std::pow (h, p) / static_cast<double> (p);
        }
    return g;
}

double quintic_jerk_integral (const Quintic &c, double h)
{
    Eigen::Matrix<double, 6, 1> v;
    for (std::size_t k = 0; k < 6; ++k)
        v (static_cast<Eigen::Index> (k)) = c[k];
    return v.dot (jerk_gram (h) * v);
}

PolynomialTrajectory::PolynomialTrajectory (std::vector<double> knots, std::vector<Quintic> x,
                                            std::vector<Quintic> y)
    : knots_ (std::move (knots)), x_ (std::move (x)), y_ (std::move (y))
{
    if (x_.empty () || x_.size () != y_.size () || knots_.size () != x_.size () + 1)
        throw PreconditionError ("PolynomialTrajectory: knots/segments size mismatch");
    if (knots_.front () != 0.0)
        throw PreconditionError ("PolynomialTrajectory: first knot must be 0");
    for (std::size_t i = 0; i + 1 < knots_.size (); ++i)
        if (!(knots_[i + 1] > knots_[i]))
            throw PreconditionError ("PolynomialTrajectory: knots must be strictly increasing");
}

std::size_t PolynomialTrajectory::segment_index (double t) const
{
    if (t <= 0.0)
        return 0;
    const auto it = std::upper_bound (knots_.begin (), knots_.end (), t);
    const auto idx = static_cast<std::size_t> (std::distance (knots_.begin (), it));
    return std::min (idx == 0 ? 0 : idx - 1, x_.size () - 1);
}

Eigen::Vector2d PolynomialTrajectory::derivative (double t, int order) const
{
    t = std::clamp (t, 0.0, duration ());
    const std::size_t i = segment_index (t);
    const double tau = t - knots_[i];
    return {quintic_derivative (x_[i], tau, order), quintic_derivative (y_[i], tau, order)};
}

PolynomialTrajectory::Sample PolynomialTrajectory::evaluate (double t) const
{
    t = std::clamp (t, 0.0, duration ());
    const std::size_t i = segment_index (t);
    const double tau = t - knots_[i];
    auto at = [&] (int order) {
        return Eigen::Vector2d (quintic_derivative (x_[i], tau, order), quintic_derivative (y_[i], tau, order));
    };
    return {at (0), at (1), at (2), at (3)};
}

double PolynomialTrajectory::jerk_integral () const
{
    double total = 0.0;
    for (std::size_t i = 0; i < x_.size (); ++i)
    {
        const double h = knots_[i + 1] - knots_[i];
        total += quintic_jerk_integral (x_[i], h) + quintic_jerk_integral (y_[i], h);
    }
    return total;
}

double PolynomialTrajectory::arc_length () const
{
    double total = 0.0;
    for (std::size_t i = 0; i < x_.size (); ++i)
    {
        const double h = knots_[i + 1] - knots_[i];
        // speed is not polynomial; split each segment to keep the rule accurate
        constexpr int kSplit = 4;
        for (int part = 0; part < kSplit; ++part)
        {
            const double a = h * part / kSplit, b = h * (part + 1) / kSplit;
            total += gauss_legendre (a, b, [&] (double tau) {
                return std::hypot (quintic_derivative (x_[i], tau, 1), quintic_derivative (y_[i], tau, 1));
            });
        }
    }
    return total;
}

} // namespace overtake
