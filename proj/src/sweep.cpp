#include "dasee/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "dasee/errors.hpp"
#include "dasee/io.hpp"

namespace dasee {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

const char* kSchemeNames[] = {"uc-opt", "nc-opt", "uc-ft", "uc-fp", "nc-ft", "nc-fp"};
const char* kVarNames[] = {"E", "P", "N", "K", "w1"};
const char* kValueColumns[] = {"E_mW", "P_W", "N", "K", "w1"};

int as_count(double v, const char* what) {
    if (v != std::floor(v) || v < 1) throw InvalidConfig(std::string(what) + " values must be positive integers");
    return static_cast<int>(v);
}

}  // namespace

std::string to_string(Scheme s) { return kSchemeNames[static_cast<int>(s)]; }

Scheme parse_scheme(const std::string& name) {
    for (int i = 0; i < 6; ++i)
        if (name == kSchemeNames[i]) return static_cast<Scheme>(i);
    throw InvalidConfig("unknown scheme: " + name);
}

std::vector<Scheme> all_schemes() {
    return {Scheme::uc_opt, Scheme::nc_opt, Scheme::uc_ft, Scheme::uc_fp, Scheme::nc_ft, Scheme::nc_fp};
}

bool is_uc(Scheme s) { return s == Scheme::uc_opt || s == Scheme::uc_ft || s == Scheme::uc_fp; }

std::string to_string(SweepVar v) { return kVarNames[static_cast<int>(v)]; }

SweepVar parse_sweep_var(const std::string& name) {
    for (int i = 0; i < 5; ++i)
        if (name == kVarNames[i]) return static_cast<SweepVar>(i);
    throw InvalidConfig("unknown sweep variable: " + name + " (expected E, P, N, K or w1)");
}

std::string value_column(SweepVar v) { return kValueColumns[static_cast<int>(v)]; }

SolveReport run_scheme(Scheme s, const Scenario& sc, const Channel& ch, const SolverOptions& opt) {
    switch (s) {
        case Scheme::uc_opt: return solve_uc(sc, ch, opt.uc);
        case Scheme::nc_opt: return solve_nc(sc, ch, opt.nc);
        case Scheme::uc_ft: return solve_uc_ft(sc, ch, opt.uc);
        case Scheme::uc_fp: return solve_uc_fp(sc, ch);
        case Scheme::nc_ft: return solve_nc_ft(sc, ch, opt.nc);
        case Scheme::nc_fp: return solve_nc_fp(sc, ch);
    }
    throw std::logic_error("run_scheme: bad scheme");
}

ScenarioParams apply_sweep(ScenarioParams p, SweepVar var, double value) {
    switch (var) {
        case SweepVar::energy_req:
            if (value < 0) throw InvalidConfig("E values must be >= 0");
            p.energy_req = value * 1e-3;
            break;
        case SweepVar::power_cap:
            if (value < 0) throw InvalidConfig("P values must be >= 0");
            p.power_cap = value;
            break;
        case SweepVar::num_ports: p.num_ports = as_count(value, "N"); break;
        case SweepVar::num_users: {
            int k = as_count(value, "K");
            if (k < 2) throw InvalidConfig("K values must be >= 2");
            if (!p.weights.empty()) p.weights.resize(k, 1.0);
            p.num_users = k;
            break;
        }
        case SweepVar::weight1:
            if (value < 0) throw InvalidConfig("w1 values must be >= 0");
            if (p.weights.empty()) p.weights.assign(p.num_users, 1.0);
            p.weights[0] = value;
            break;
    }
    return p;
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial) {
    return base_seed ^ splitmix64(static_cast<std::uint64_t>(trial));
}

std::uint64_t channel_seed(std::uint64_t ts) { return splitmix64(ts ^ 0x6a09e667f3bcc909ULL); }

void SweepConfig::validate() const {
    if (values.empty()) throw InvalidConfig("sweep value list is empty");
    if (trials < 1) throw InvalidConfig("trials must be >= 1");
    if (schemes.empty()) throw InvalidConfig("no schemes selected");
    for (double v : values) (void)apply_sweep(base, var, v);
}

bool SweepResult::any_convergence_failure() const {
    for (auto& r : records)
        if (r.feasible && !r.converged) return true;
    return false;
}

SweepResult run_sweep(const SweepConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    SweepResult res;
    res.config = cfg;
    for (int pt = 0; pt < static_cast<int>(cfg.values.size()); ++pt) {
        ScenarioParams prm = apply_sweep(cfg.base, cfg.var, cfg.values[pt]);
        for (int t = 0; t < cfg.trials; ++t) {
            if (progress) progress(pt, t);
            std::uint64_t ts = trial_seed(cfg.seed, t);
            Scenario sc = generate_scenario(prm, ts);
            Channel ch = generate_channel(sc, channel_seed(ts));
            for (Scheme s : cfg.schemes) {
                TrialRecord rec;
                rec.point = pt;
                rec.value = cfg.values[pt];
                rec.trial = t;
                rec.trial_seed = ts;
                rec.scheme = s;
                auto t0 = std::chrono::steady_clock::now();
                try {
                    SolveReport r = run_scheme(s, sc, ch, cfg.solver);
                    rec.feasible = r.feasible;
                    rec.converged = r.converged;
                    rec.ee = r.objective;
                    rec.uc_ee = r.uc_ee;
                    rec.nc_ee = r.nc_ee;
                    rec.per_user_ee = r.per_user_ee;
                    rec.outer_iters = r.outer_iters;
                    rec.inner_iters = r.inner_iters;
                    rec.message = r.message;
                } catch (const std::runtime_error& e) {
                    rec.feasible = true;
                    rec.converged = false;
                    rec.message = e.what();
                }
                rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                res.records.push_back(std::move(rec));
            }
        }
    }
    return res;
}

void write_csv(std::ostream& os, const SweepResult& res) {
    const SweepConfig& cfg = res.config;
    os << "sweep_var," << value_column(cfg.var)
       << ",trial,trial_seed,scheme,feasible,converged,ee_npHzJ,uc_ee_npHzJ,nc_ee_npHzJ,user_ee_npHzJ,"
          "outer_iters,inner_iters";
    if (cfg.timing) os << ",wall_time_s";
    os << "\n";
    for (auto& r : res.records) {
        os << to_string(cfg.var) << ',' << format_double(r.value) << ',' << r.trial << ',' << r.trial_seed << ','
           << to_string(r.scheme) << ',' << (r.feasible ? 1 : 0) << ',' << (r.converged ? 1 : 0) << ','
           << format_double(r.ee) << ',' << format_double(r.uc_ee) << ',' << format_double(r.nc_ee) << ',';
        for (int k = 0; k < r.per_user_ee.size(); ++k) os << (k ? ";" : "") << format_double(r.per_user_ee(k));
        os << ',' << r.outer_iters << ',' << r.inner_iters;
        if (cfg.timing) os << ',' << format_double(r.wall_time_s);
        os << "\n";
    }
}

const SchemeTrend* TrendReport::find(Scheme s) const {
    for (auto& t : schemes)
        if (t.scheme == s) return &t;
    return nullptr;
}

TrendReport summarize(const SweepResult& res, bool paired) {
    const SweepConfig& cfg = res.config;
    const int P = static_cast<int>(cfg.values.size());
    TrendReport tr;
    tr.var = cfg.var;
    tr.values = cfg.values;
    tr.paired = paired;
    std::vector<char> keep(cfg.trials, 1);
    if (paired)
        for (auto& r : res.records)
            if (!r.feasible) keep[r.trial] = 0;
    tr.trials_used = static_cast<int>(std::count(keep.begin(), keep.end(), 1));
    for (Scheme s : cfg.schemes) {
        SchemeTrend st;
        st.scheme = s;
        std::vector<double> sum(P, 0.0), sq(P, 0.0);
        std::vector<VectorXd> usum(P), usq(P);
        st.count.assign(P, 0);
        st.infeasible.assign(P, 0);
        st.unconverged.assign(P, 0);
        for (auto& r : res.records) {
            if (r.scheme != s) continue;
            if (!r.feasible) {
                ++st.infeasible[r.point];
                continue;
            }
            if (!keep[r.trial]) continue;
            if (!r.converged) ++st.unconverged[r.point];
            ++st.count[r.point];
            sum[r.point] += r.ee;
            sq[r.point] += r.ee * r.ee;
            VectorXd& um = usum[r.point];
            if (um.size() == 0) {
                um = VectorXd::Zero(r.per_user_ee.size());
                usq[r.point] = um;
            }
            if (um.size() == r.per_user_ee.size()) {
                um += r.per_user_ee;
                usq[r.point] += r.per_user_ee.cwiseAbs2();
            }
        }
        auto se = [](double s1, double s2, int n) {
            if (n < 2) return 0.0;
            double m = s1 / n;
            return std::sqrt(std::max(0.0, (s2 - n * m * m) / (n - 1)) / n);
        };
        for (int p = 0; p < P; ++p) {
            int n = st.count[p];
            st.mean.push_back(n ? sum[p] / n : 0.0);
            st.stderr_.push_back(se(sum[p], sq[p], n));
            VectorXd um = usum[p], us = VectorXd::Zero(um.size());
            for (Eigen::Index k = 0; k < um.size(); ++k) us(k) = se(um(k), usq[p](k), n);
            if (n) um /= n;
            st.user_mean.push_back(um);
            st.user_stderr.push_back(us);
        }
        tr.schemes.push_back(std::move(st));
    }
    return tr;
}

MonotoneVerdict check_monotone(const std::vector<double>& mean, const std::vector<double>& se, Direction dir,
                               double slack) {
    MonotoneVerdict v;
    for (std::size_t p = 1; p < mean.size(); ++p) {
        double step = mean[p] - mean[p - 1];
        if (dir == Direction::nonincreasing) step = -step;
        double tol = slack * std::max(se.empty() ? 0.0 : se[p - 1], se.empty() ? 0.0 : se[p]);
        if (step < -tol - 1e-12 * std::max(std::abs(mean[p]), std::abs(mean[p - 1]))) {
            v.ok = false;
            v.offending = static_cast<int>(p);
            return v;
        }
    }
    return v;
}

bool decreasing_from(const std::vector<double>& mean, int first) {
    for (std::size_t p = std::max(first, 0) + 1; p < mean.size(); ++p)
        if (!(mean[p] < mean[p - 1])) return false;
    return true;
}

void write_summary_csv(std::ostream& os, const TrendReport& tr) {
    os << "sweep_var," << value_column(tr.var) << ",scheme,mean_ee_npHzJ,stderr_ee_npHzJ,n,infeasible,unconverged,"
       << "user_mean_ee_npHzJ,user_stderr_ee_npHzJ\n";
    for (std::size_t p = 0; p < tr.values.size(); ++p) {
        for (auto& st : tr.schemes) {
            os << to_string(tr.var) << ',' << format_double(tr.values[p]) << ',' << to_string(st.scheme) << ','
               << format_double(st.mean[p]) << ',' << format_double(st.stderr_[p]) << ',' << st.count[p] << ','
               << st.infeasible[p] << ',' << st.unconverged[p] << ',';
            const VectorXd& um = st.user_mean[p];
            for (int k = 0; k < um.size(); ++k) os << (k ? ";" : "") << format_double(um(k));
            os << ',';
            const VectorXd& us = st.user_stderr[p];
            for (int k = 0; k < us.size(); ++k) os << (k ? ";" : "") << format_double(us(k));
            os << "\n";
        }
    }
}

void write_verdicts(std::ostream& os, const TrendReport& tr) {
    const int P = static_cast<int>(tr.values.size());
    auto yes = [](bool b) { return b ? "yes" : "no"; };
    if (tr.paired) os << "trends over " << tr.trials_used << " trials feasible at every point\n";
    for (auto& st : tr.schemes) {
        for (auto dir : {Direction::nonincreasing, Direction::nondecreasing}) {
            MonotoneVerdict v = check_monotone(st.mean, st.stderr_, dir);
            os << to_string(st.scheme) << ": monotone "
               << (dir == Direction::nonincreasing ? "nonincreasing" : "nondecreasing") << ": " << yes(v.ok);
            if (!v.ok) os << " (at " << value_column(tr.var) << "=" << format_double(tr.values[v.offending]) << ")";
            os << "\n";
        }
        if (P >= 3)
            os << to_string(st.scheme) << ": decreasing in upper half: " << yes(decreasing_from(st.mean, (P - 1) / 2))
               << "\n";
    }
    for (auto [hi, lo] : {std::pair{Scheme::uc_opt, Scheme::uc_ft}, std::pair{Scheme::uc_ft, Scheme::uc_fp},
                          std::pair{Scheme::nc_opt, Scheme::nc_ft}, std::pair{Scheme::nc_ft, Scheme::nc_fp},
                          std::pair{Scheme::uc_opt, Scheme::nc_opt}}) {
        const SchemeTrend* a = tr.find(hi);
        const SchemeTrend* b = tr.find(lo);
        if (!a || !b) continue;
        int bad = -1;
        for (int p = 0; p < P && bad < 0; ++p)
            if (a->mean[p] < b->mean[p] * (1.0 - 1e-6)) bad = p;
        os << to_string(hi) << " >= " << to_string(lo) << " in mean: " << yes(bad < 0);
        if (bad >= 0) os << " (at " << value_column(tr.var) << "=" << format_double(tr.values[bad]) << ")";
        os << "\n";
    }
}

}  // namespace dasee
