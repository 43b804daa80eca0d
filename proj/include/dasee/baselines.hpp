#pragma once

#include <string>

#include "dasee/lp.hpp"
#include "dasee/nc_solver.hpp"
#include "dasee/uc_solver.hpp"

namespace dasee {

enum class BaselineKind { uc_ft, uc_fp, nc_ft, nc_fp };

std::string to_string(BaselineKind k);

SolveReport solve_uc_ft(const Scenario& sc, const Channel& ch, const UcConfig& cfg = {});
// Every user keeps tau >= tau_lo when the energy rows allow it.
SolveReport solve_uc_fp(const Scenario& sc, const Channel& ch, double tau_lo = 1e-4);
SolveReport solve_nc_ft(const Scenario& sc, const Channel& ch, const NcConfig& cfg = {});
SolveReport solve_nc_fp(const Scenario& sc, const Channel& ch, double tol = 1e-10, int max_iter = 100);

// Per-user constants at full power: r_k = ln(1 + h_k.Pbar/sigma2), c_k = sum Pbar + pc_k
VectorXd full_power_rates(const Scenario& sc, const Channel& ch);
VectorXd full_power_costs(const Scenario& sc);

// Time LP at full power: max sum_k (w_k r_k - q c_k) tau_k subject to the
// harvested-energy rows, sum tau <= 1, 0 <= tau <= 1.
LinearProgram nc_fp_lp(const Scenario& sc, const Channel& ch, double q);
// Max-min energy slack time allocation at full power, optionally with tau >= tau_lo.
LinearProgram fp_slack_lp(const Scenario& sc, const Channel& ch, double tau_lo = 0.0);

}  // namespace dasee
