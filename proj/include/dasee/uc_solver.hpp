#pragma once

#include <functional>

#include "dasee/inner_solver.hpp"
#include "dasee/report.hpp"

namespace dasee {

struct RatioParams {
    VectorXd alpha;
    VectorXd beta;
    int n = 0;
};

struct NewtonConfig {
    double epsilon = 0.1;
    double xi = 0.5;
    int max_m = 50;
    int max_outer = 100;
    double psi_tol = 1e-6;
};

// psi_k = alpha_k T_k - 1, psi_{k+K} = w_k R_k - beta_k T_k,  T_k = sum_i s_ik + tau_k pc_k
VectorXd psi(const Allocation& a, const Scenario& sc, const Channel& ch, const RatioParams& rp);
// psi with rows of users holding T_k = 0 removed from the norm
double psi_norm(const VectorXd& psi_vec, const Allocation& a, const Scenario& sc);

// Ratio parameters that zero psi at the given allocation (the full Newton step).
RatioParams ratio_params_at(const Allocation& a, const Scenario& sc, const Channel& ch);

struct NewtonStep {
    RatioParams params;
    Allocation alloc;
    double gamma = 1.0;
    int m = 0;
    double psi_norm = 0.0;
};

// Maps ratio parameters to the inner allocation they induce.
using InnerMap = std::function<Allocation(const RatioParams&)>;

// Damped Newton update of (alpha, beta) with q = -[psi']^{-1} psi and the
// Armijo-type acceptance ||psi(new)|| <= (1 - eps xi^m) ||psi||.
NewtonStep newton_step(const RatioParams& rp, const Allocation& a, const Scenario& sc, const Channel& ch,
                       const NewtonConfig& cfg, const InnerMap& inner);

struct UcConfig {
    NewtonConfig newton;
    DualConfig dual;
    double tau_min = 1e-4;
    double gap_tol = 1e-9;    // relative to the current UC-EE
    int line_search_iters = 60;
    int polish_iters = 30;   // active-set Newton steps after each ascent step, 0 disables
    bool fixed_time = false;  // UC-FT
    bool warm_start = true;   // start the free-time run from the UC-FT solution
    bool multi_start = true;  // also start from the max-min energy-slack point, keep the best
    int source_starts = 3;    // best source-set starts (some users at full power) added to the pool
};

SolveReport solve_uc(const Scenario& sc, const Channel& ch, const UcConfig& cfg = {});
SolveReport solve_uc_from(const Scenario& sc, const Channel& ch, const UcConfig& cfg, const Allocation& start);

}  // namespace dasee
