#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace overtake
{

/// {c + G beta : |beta_i| <= 1}
class Zonotope
{
  public:
    Zonotope () = default;
    Zonotope (Eigen::VectorXd center, Eigen::MatrixXd generators);

    static Zonotope point (const Eigen::VectorXd &c);
    /// Axis-aligned box with the given center and non-negative half-widths.
    static Zonotope box (const Eigen::VectorXd &center, const Eigen::VectorXd &radius);

    Eigen::Index dim () const { return center_.size (); }
    Eigen::Index generator_count () const { return generators_.cols (); }
    const Eigen::VectorXd &center () const { return center_; }
    const Eigen::MatrixXd &generators () const { return generators_; }

    /// Half-widths of the interval hull.
    Eigen::VectorXd radius () const;
    Eigen::VectorXd lower () const { return center_ - radius (); }
    Eigen::VectorXd upper () const { return center_ + radius (); }
    /// Interval hull as a zonotope.
    Zonotope interval_hull () const { return box (center_, radius ()); }

    /// max over the set of d^T x
    double support (const Eigen::VectorXd &d) const;

    Zonotope linear_map (const Eigen::MatrixXd &M) const;
    Zonotope translate (const Eigen::VectorXd &v) const;
    /// Minkowski sum.
    Zonotope operator+ (const Zonotope &other) const;

    /// Boxes the smallest generators so that at most `max_generators` remain (at least dim()).
    Zonotope reduce (std::size_t max_generators) const;
    /// Drops all-zero generator columns.
    Zonotope compact () const;

    /// Appends coordinate value `value` with no spread (used for the [x; 1] augmented state).
    Zonotope augment (double value) const;
    /// Keeps the first n coordinates.
    Zonotope project (Eigen::Index n) const;

  private:
    Eigen::VectorXd center_;
    Eigen::MatrixXd generators_;
};

/// Elementwise interval matrix [lower, upper].
struct IntervalMatrix
{
    Eigen::MatrixXd lower;
    Eigen::MatrixXd upper;

    IntervalMatrix () = default;
    IntervalMatrix (Eigen::MatrixXd lo, Eigen::MatrixXd hi);
    /// Symmetric interval [-r, r].
    static IntervalMatrix symmetric (const Eigen::MatrixXd &r);

    Eigen::MatrixXd center () const { return 0.5 * (lower + upper); }
    Eigen::MatrixXd radius () const { return 0.5 * (upper - lower); }
    Eigen::MatrixXd width () const { return upper - lower; }
};

/// Enclosure of {M x : M in I, x in Z}: center(I) Z plus a box for the spread.
Zonotope operator* (const IntervalMatrix &I, const Zonotope &Z);

/// Enclosure of the convex hull of Z and a linear image Z2 = M Z sharing generators column by column.
Zonotope hull_enclosure (const Zonotope &a, const Zonotope &b);

/// True iff p = c + G beta for some |beta|_inf <= 1 + tol (linear program on |beta|_inf).
bool zonotope_contains (const Zonotope &z, const Eigen::VectorXd &p, double tol = 1e-6);

/// Smallest |beta|_inf representing p (+inf when p is outside the affine hull).
double zonotope_norm (const Zonotope &z, const Eigen::VectorXd &p);

} // namespace overtake
