#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace overtake
{

/// Ascending-power coefficients of one quintic in local segment time.
using Quintic = std::array<double, 6>;

/// Value of the `order`-th derivative of `c` at local time `tau`.
double quintic_derivative (const Quintic &c, double tau, int order);

/// Quintic matching (p, v, a) at tau = 0 and tau = h.
Quintic hermite_quintic (double p0, double v0, double a0, double p1, double v1, double a1, double h);

/// Linear map from boundary data (p0, v0, a0, p1, v1, a1) to the quintic coefficients.
Eigen::Matrix<double, 6, 6> hermite_basis (double h);

/// Exact integral over [0, h] of the squared third derivative of a quintic.
double quintic_jerk_integral (const Quintic &c, double h);

/// Gram matrix G with c^T G c = integral over [0, h] of (c'''(tau))^2.
Eigen::Matrix<double, 6, 6> jerk_gram (double h);

/**
 * Piecewise-quintic planar curve Q(t) = (x(t), y(t)), t in [0, T].
 *
 * Segment i covers [knots[i], knots[i+1]] and is stored in local time
 * tau = t - knots[i]. Evaluation outside [0, T] clamps to the end points.
 */
class PolynomialTrajectory
{
  public:
    struct Sample
    {
        Eigen::Vector2d position;
        Eigen::Vector2d velocity;
        Eigen::Vector2d acceleration;
        Eigen::Vector2d jerk;
    };

    PolynomialTrajectory () = default;
    PolynomialTrajectory (std::vector<double> knots, std::vector<Quintic> x, std::vector<Quintic> y);

    double duration () const { return knots_.empty () ? 0.0 : knots_.back (); }
    std::size_t segment_count () const { return x_.size (); }
    std::span<const double> knots () const { return knots_; }
    const Quintic &x_coeffs (std::size_t seg) const { return x_[seg]; }
    const Quintic &y_coeffs (std::size_t seg) const { return y_[seg]; }

    /// Index of the segment containing t (the later one at interior knots).
    std::size_t segment_index (double t) const;

    Eigen::Vector2d position (double t) const { return derivative (t, 0); }
    Eigen::Vector2d derivative (double t, int order) const;
    Sample evaluate (double t) const;

    /// Integral of |Q'''|^2 over [0, T], exact.
    double jerk_integral () const;
    /// Arc length by per-segment Gauss-Legendre quadrature.
    double arc_length () const;

    bool operator== (const PolynomialTrajectory &) const = default;

  private:
    std::vector<double> knots_;
    std::vector<Quintic> x_;
    std::vector<Quintic> y_;
};

} // namespace overtake
