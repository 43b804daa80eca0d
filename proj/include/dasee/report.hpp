#pragma once

#include <string>
#include <vector>

#include "dasee/model.hpp"

namespace dasee {

struct SolveReport {
    std::string scheme;
    bool feasible = true;
    bool converged = false;
    double objective = 0.0;  // UC-EE for UC schemes, NC-EE for NC schemes
    double uc_ee = 0.0;
    double nc_ee = 0.0;
    VectorXd per_user_ee;
    Allocation alloc;
    VectorXd alpha, beta;    // UC only
    double psi_norm = 0.0;   // UC only
    double gap = 0.0;        // max subtractive value at the last outer step (UC)
    double t_residual = 0.0; // |T(q*)| (NC)
    int outer_iters = 0;
    int inner_iters = 0;
    std::vector<double> trace;  // objective per outer step (q for NC)
    double wall_time_s = 0.0;
    std::string message;
};

}  // namespace dasee
