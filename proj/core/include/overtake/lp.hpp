#pragma once

#include <Eigen/Core>

namespace overtake
{

struct LpResult
{
    enum class Status
    {
        optimal,
        infeasible,
        unbounded,
        iteration_limit
    };
    Status status = Status::infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
};

/**
 * Dense two-phase simplex for   min c^T x  s.t.  A x = b,  x >= 0.
 *
 * Pivoting follows Bland's rule, so it terminates on degenerate problems.
 * Meant for the small programs of zonotope containment (tens of rows).
 */
LpResult solve_standard_lp (const Eigen::VectorXd &c, const Eigen::MatrixXd &A, const Eigen::VectorXd &b,
                            double tol = 1e-10);

} // namespace overtake
