#pragma once

#include <limits>

#include "dasee/inner_solver.hpp"

namespace dasee {

struct GridSpec {
    int power_points = 60;   // per port per user: 0 plus (power_points-1) log-spaced values
    int time_points = 100;   // uniform on [0, 1]
    double power_floor = 1e-5;  // smallest log-spaced power as a fraction of the cap
    double max_evaluations = 1e8;

    // nested refinement: log and time spacings divided by `factor`
    GridSpec refined(int factor) const;
};

struct GridResult {
    double value = 0.0;
    bool feasible = false;
    Allocation alloc;
    double evaluations = 0.0;
};

// Exhaustive search over the product grid for K = 2 users.
// UC uses tau_2 = 1 - tau_1 (raising a time share never lowers the UC objective).
GridResult grid_search_uc(const Scenario& sc, const Channel& ch, const GridSpec& g = {},
                          const VectorXd& fixed_tau = {});
GridResult grid_search_nc(const Scenario& sc, const Channel& ch, const GridSpec& g = {},
                          const VectorXd& fixed_tau = {});

struct FiniteDiffReport {
    double max_rel_err_tau = 0.0;
    double max_rel_err_s = 0.0;
    double max_rel_err_tau2 = 0.0;
    double max_d2_tau = -std::numeric_limits<double>::infinity();
    int checks = 0;
};

// Central differences of the Lagrangian against the analytic partials at (tau, s).
FiniteDiffReport finite_diff(const SubtractiveProblem& pr, const DualState& d, const Scenario& sc,
                             const Channel& ch, const VectorXd& tau, const MatrixXd& s, double rel_step = 1e-6);

}  // namespace dasee
