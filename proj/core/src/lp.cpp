#include <overtake/lp.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include <overtake/errors.hpp>

namespace overtake
{

namespace
{

class Tableau
{
  public:
    Tableau (const Eigen::MatrixXd &A, const Eigen::VectorXd &b)
        : m_ (A.rows ()), n_ (A.cols ()), t_ (Eigen::MatrixXd::Zero (m_ + 1, n_ + m_ + 1)), basis_ (static_cast<std::size_t> (m_))
    {
        for (Eigen::Index i = 0; i < m_; ++i)
        {
            const double sign = b (i) < 0.0 ? -1.0 : 1.0;
            t_.row (i).head (n_) = sign * A.row (i);
            t_ (i, n_ + i) = 1.0;
            t_ (i, n_ + m_) = sign * b (i);
            basis_[static_cast<std::size_t> (i)] = n_ + i;
        }
    }

    Eigen::Index rows () const { return m_; }
    Eigen::Index vars () const { return n_; }
    double rhs (Eigen::Index i) const { return t_ (i, n_ + m_); }
    double objective_value () const { return -t_ (m_, n_ + m_); }
    Eigen::Index basic (Eigen::Index i) const { return basis_[static_cast<std::size_t> (i)]; }
    double at (Eigen::Index i, Eigen::Index j) const { return t_ (i, j); }

    /// Replaces the objective row with reduced costs of `cost` (length n + m) for the current basis.
    void set_cost (const Eigen::VectorXd &cost)
    {
        t_.row (m_).setZero ();
        t_.row (m_).head (n_ + m_) = cost.transpose ();
        for (Eigen::Index i = 0; i < m_; ++i)
        {
            const double cb = cost (basic (i));
            if (cb != 0.0)
                t_.row (m_) -= cb * t_.row (i);
        }
    }

    void pivot (Eigen::Index row, Eigen::Index col)
    {
        t_.row (row) /= t_ (row, col);
        for (Eigen::Index i = 0; i <= m_; ++i)
            if (i != row && t_ (i, col) != 0.0)
                t_.row (i) -= t_ (i, col) * t_.row (row);
        basis_[static_cast<std::size_t> (row)] = col;
    }

    /// Runs Bland-rule pivots over columns [0, allowed). Returns the final status.
    LpResult::Status optimize (Eigen::Index allowed, double tol, std::size_t max_iter)
    {
        for (std::size_t iter = 0; iter < max_iter; ++iter)
        {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j)
                if (t_ (m_, j) < -tol)
                {
                    enter = j;
                    break;
                }
            if (enter < 0)
                return LpResult::Status::optimal;
            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity ();
            for (Eigen::Index i = 0; i < m_; ++i)
            {
                const double a = t_ (i, enter);
                if (a <= tol)
                    continue;
                const double ratio = rhs (i) / a;
                if (ratio < best - 1e-14 || (std::abs (ratio - best) <= 1e-14 && leave >= 0 && basic (i) < basic (leave)))
                {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0)
                return LpResult::Status::unbounded;
            pivot (leave, enter);
        }
        return LpResult::Status::iteration_limit;
    }

  private:
    Eigen::Index m_;
    Eigen::Index n_;
    Eigen::MatrixXd t_;
    std::vector<Eigen::Index> basis_;
};

} // namespace

LpResult solve_standard_lp (const Eigen::VectorXd &c, const Eigen::MatrixXd &A, const Eigen::VectorXd &b, double tol)
{
    if (A.rows () != b.size () || A.cols () != c.size ())
        throw PreconditionError ("solve_standard_lp: dimension mismatch");
    const Eigen::Index m = A.rows (), n = A.cols ();
    Tableau tab (A, b);
    const std::size_t max_iter = 50 * static_cast<std::size_t> (m + n + 1);

    // Phase 1: drive the artificial variables to zero.
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero (n + m);
    phase1.tail (m).setOnes ();
    tab.set_cost (phase1);
    LpResult out;
    const auto s1 = tab.optimize (n + m, tol, max_iter);
    if (s1 == LpResult::Status::iteration_limit)
    {
        out.status = s1;
        return out;
    }
    if (tab.objective_value () > 1e-9 * (1.0 + b.cwiseAbs ().maxCoeff ()))
    {
        out.status = LpResult::Status::infeasible;
        return out;
    }
    for (Eigen::Index i = 0; i < m; ++i)
    {
        if (tab.basic (i) < n)
            continue;
        for (Eigen::Index j = 0; j < n; ++j)
            if (std::abs (tab.at (i, j)) > 1e-9)
            {
                tab.pivot (i, j);
                break;
            }
    }

    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero (n + m);
    phase2.head (n) = c;
    tab.set_cost (phase2);
    out.status = tab.optimize (n, tol, max_iter);
    out.x = Eigen::VectorXd::Zero (n);
    for (Eigen::Index i = 0; i < m; ++i)
        if (tab.basic (i) < n)
            out.x (tab.basic (i)) = tab.rhs (i);
    out.objective = c.dot (out.x);
    return out;
}

} // namespace overtake
