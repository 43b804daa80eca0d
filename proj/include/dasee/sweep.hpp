#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dasee/baselines.hpp"

namespace dasee {

enum class Scheme { uc_opt, nc_opt, uc_ft, uc_fp, nc_ft, nc_fp };
enum class SweepVar { energy_req, power_cap, num_ports, num_users, weight1 };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);
std::vector<Scheme> all_schemes();
bool is_uc(Scheme s);

std::string to_string(SweepVar v);
SweepVar parse_sweep_var(const std::string& name);
// CSV header for the sweep value, with unit suffix
std::string value_column(SweepVar v);

struct SolverOptions {
    UcConfig uc;
    NcConfig nc;
};

SolveReport run_scheme(Scheme s, const Scenario& sc, const Channel& ch, const SolverOptions& opt = {});

// Scenario parameters at one sweep point. E in mW, P in W.
ScenarioParams apply_sweep(ScenarioParams base, SweepVar var, double value);

std::uint64_t trial_seed(std::uint64_t base_seed, int trial);
std::uint64_t channel_seed(std::uint64_t trial_seed);

struct SweepConfig {
    SweepVar var = SweepVar::energy_req;
    std::vector<double> values;
    int trials = 100;
    ScenarioParams base;
    std::vector<Scheme> schemes = all_schemes();
    std::uint64_t seed = 1;
    std::string out_path;
    bool timing = false;  // add wall time column (breaks byte reproducibility)
    SolverOptions solver;

    void validate() const;
};

struct TrialRecord {
    int point = 0;
    double value = 0.0;
    int trial = 0;
    std::uint64_t trial_seed = 0;
    Scheme scheme = Scheme::uc_opt;
    bool feasible = false;
    bool converged = false;
    double ee = 0.0;  // UC-EE for UC schemes, NC-EE for NC schemes
    double uc_ee = 0.0;
    double nc_ee = 0.0;
    VectorXd per_user_ee;
    int outer_iters = 0;
    int inner_iters = 0;
    double wall_time_s = 0.0;
    std::string message;
};

struct SweepResult {
    SweepConfig config;
    std::vector<TrialRecord> records;  // ordered by (point, trial, scheme)
    bool any_convergence_failure() const;
};

using ProgressFn = std::function<void(int point, int trial)>;

SweepResult run_sweep(const SweepConfig& cfg, const ProgressFn& progress = {});

void write_csv(std::ostream& os, const SweepResult& res);

struct SchemeTrend {
    Scheme scheme = Scheme::uc_opt;
    std::vector<double> mean, stderr_;
    std::vector<int> count, infeasible, unconverged;
    std::vector<VectorXd> user_mean;  // per point, mean per-user EE
    std::vector<VectorXd> user_stderr;
};

struct TrendReport {
    SweepVar var = SweepVar::energy_req;
    std::vector<double> values;
    std::vector<SchemeTrend> schemes;
    bool paired = false;
    int trials_used = 0;
    const SchemeTrend* find(Scheme s) const;
};

// Means exclude infeasible trials. With `paired`, only trials feasible for every scheme at
// every point enter the means, so each point averages the same instances.
TrendReport summarize(const SweepResult& res, bool paired = false);

enum class Direction { nonincreasing, nondecreasing };

struct MonotoneVerdict {
    bool ok = true;
    int offending = -1;  // first point whose step violates the direction
};

// Each consecutive step may go the wrong way by at most slack * stderr of the pair.
MonotoneVerdict check_monotone(const std::vector<double>& mean, const std::vector<double>& se, Direction dir,
                               double slack = 1.0);
// Strictly decreasing over points [first, end).
bool decreasing_from(const std::vector<double>& mean, int first);

void write_summary_csv(std::ostream& os, const TrendReport& tr);
void write_verdicts(std::ostream& os, const TrendReport& tr);

}  // namespace dasee
