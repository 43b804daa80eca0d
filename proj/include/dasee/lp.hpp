#pragma once

#include <vector>

#include <Eigen/Dense>

namespace dasee {

enum class RowSense { le, ge, eq };
enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

// maximize c'x  s.t.  A x (sense) b,  x >= 0
struct LinearProgram {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    std::vector<RowSense> sense;
    Eigen::VectorXd c;
};

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
};

// Dense two-phase revised simplex (refactorized basis, Harris ratio test,
// Dantzig pricing with a Bland fallback on degenerate runs).
LpResult solve_lp(const LinearProgram& lp, double tol = 1e-11, int max_iter = 50000);

}  // namespace dasee
