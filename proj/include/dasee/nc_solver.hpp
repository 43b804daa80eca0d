#pragma once

#include "dasee/inner_solver.hpp"
#include "dasee/report.hpp"

namespace dasee {

struct NcConfig {
    DualConfig dual;
    double tol = 1e-6;   // |T(q)|
    double bound_tol = 1e-4;  // dual upper bound on T(q) at termination
    int max_iter = 50;
    bool fixed_time = false;  // NC-FT
};

struct TofQ {
    double value = 0.0;  // T(q) at the recovered allocation
    double bound = 0.0;  // dual upper bound
    Allocation alloc;
    int inner_iters = 0;
    bool feasible = false;
};

// A feasible anchor keeps T(q) >= its own subtractive value.
TofQ t_of_q(const Scenario& sc, const Channel& ch, double q, const NcConfig& cfg = {},
            const Allocation* anchor = nullptr);
SolveReport solve_nc(const Scenario& sc, const Channel& ch, const NcConfig& cfg = {});

}  // namespace dasee
