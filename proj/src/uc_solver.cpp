#include "dasee/uc_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "dasee/errors.hpp"
#include "dasee/face_newton.hpp"
#include "dasee/lp.hpp"
#include "dasee/special_functions.hpp"

namespace dasee {

namespace {

VectorXd total_energy(const Allocation& a, const Scenario& sc) {
    return a.s.colwise().sum().transpose() + a.tau.cwiseProduct(sc.circuit_power);
}

VectorXd rates(const Allocation& a, const Scenario& sc, const Channel& ch) {
    VectorXd r(sc.num_users);
    for (int k = 0; k < sc.num_users; ++k) r(k) = rate(a.tau(k), a.s.col(k), ch.h.col(k), sc.noise_power);
    return r;
}

}  // namespace

VectorXd psi(const Allocation& a, const Scenario& sc, const Channel& ch, const RatioParams& rp) {
    const int K = sc.num_users;
    VectorXd T = total_energy(a, sc);
    VectorXd R = rates(a, sc, ch);
    VectorXd out(2 * K);
    for (int k = 0; k < K; ++k) {
        out(k) = rp.alpha(k) * T(k) - 1.0;
        out(k + K) = sc.weights(k) * R(k) - rp.beta(k) * T(k);
    }
    return out;
}

double psi_norm(const VectorXd& psi_vec, const Allocation& a, const Scenario& sc) {
    const int K = sc.num_users;
    VectorXd T = total_energy(a, sc);
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
        if (T(k) <= 0.0) continue;
        acc += psi_vec(k) * psi_vec(k) + psi_vec(k + K) * psi_vec(k + K);
    }
    return std::sqrt(acc);
}

RatioParams ratio_params_at(const Allocation& a, const Scenario& sc, const Channel& ch) {
    const int K = sc.num_users;
    VectorXd T = total_energy(a, sc);
    VectorXd R = rates(a, sc, ch);
    RatioParams rp{VectorXd::Zero(K), VectorXd::Zero(K), 0};
    for (int k = 0; k < K; ++k) {
        if (T(k) <= 0.0) continue;
        rp.alpha(k) = 1.0 / T(k);
        rp.beta(k) = sc.weights(k) * R(k) / T(k);
    }
    return rp;
}

NewtonStep newton_step(const RatioParams& rp, const Allocation& a, const Scenario& sc, const Channel& ch,
                       const NewtonConfig& cfg, const InnerMap& inner) {
    const int K = sc.num_users;
    VectorXd ps = psi(a, sc, ch, rp);
    double n0 = psi_norm(ps, a, sc);
    if (n0 == 0.0) throw std::invalid_argument("newton_step: psi is already zero");
    VectorXd T = total_energy(a, sc);
    VectorXd qa = VectorXd::Zero(K), qb = VectorXd::Zero(K);
    for (int k = 0; k < K; ++k) {
        if (T(k) <= 0.0) continue;  // frozen
        qa(k) = -ps(k) / T(k);
        qb(k) = ps(k + K) / T(k);
    }
    double gamma = 1.0;
    for (int m = 0; m <= cfg.max_m; ++m) {
        RatioParams trial{rp.alpha + gamma * qa, rp.beta + gamma * qb, rp.n + 1};
        Allocation na = inner(trial);
        double nn = psi_norm(psi(na, sc, ch, trial), na, sc);
        if (nn <= (1.0 - cfg.epsilon * gamma) * n0) return {trial, na, gamma, m, nn};
        gamma *= cfg.xi;
    }
    throw ConvergenceFailure("newton_step: line search found no acceptable step");
}

namespace {

using Clock = std::chrono::steady_clock;

Allocation blend(const Allocation& x, const Allocation& y, double t) {
    return make_allocation((1.0 - t) * x.tau + t * y.tau, (1.0 - t) * x.s + t * y.s);
}

double uc_value_flat(const VectorXd& z, const Scenario& sc, const Channel& ch) {
    const int N = sc.num_ports, K = sc.num_users;
    double v = 0.0;
    for (int k = 0; k < K; ++k) {
        double tau = z(k);
        if (tau <= 0.0) continue;
        double x = 0.0, sum = 0.0;
        for (int i = 0; i < N; ++i) {
            x += ch.h(i, k) * z(K + k * N + i);
            sum += z(K + k * N + i);
        }
        double T = sum + tau * sc.circuit_power(k);
        if (T <= 0.0) continue;
        v += sc.weights(k) * tau * std::log1p(x / (sc.noise_power * tau)) / T;
    }
    return v;
}

VectorXd uc_grad_flat(const VectorXd& z, const Scenario& sc, const Channel& ch) {
    const int N = sc.num_ports, K = sc.num_users;
    VectorXd g = VectorXd::Zero(z.size());
    for (int k = 0; k < K; ++k) {
        double tau = z(k);
        if (tau <= 0.0) continue;
        double x = 0.0, sum = 0.0;
        for (int i = 0; i < N; ++i) {
            x += ch.h(i, k) * z(K + k * N + i);
            sum += z(K + k * N + i);
        }
        double T = sum + tau * sc.circuit_power(k);
        if (T <= 0.0) continue;
        double y = x / (sc.noise_power * tau);
        double R = tau * std::log1p(y);
        double w = sc.weights(k);
        double dR_dtau = std::log1p(y) - y / (1.0 + y);
        g(k) = w * (dR_dtau * T - R * sc.circuit_power(k)) / (T * T);
        for (int i = 0; i < N; ++i) {
            double dR_ds = ch.h(i, k) / (sc.noise_power * (1.0 + y));
            g(K + k * N + i) = w * (dR_ds * T - R) / (T * T);
        }
    }
    return g;
}


SolveReport ascend(const Scenario& sc, const Channel& ch, const UcConfig& cfg, Allocation x, bool fixed_time,
                   SolveReport rep) {
    const int K = sc.num_users;
    VectorXd tau_lo = VectorXd::Constant(K, cfg.tau_min);
    VectorXd fixed = fixed_time ? VectorXd(x.tau) : VectorXd();
    double F = uc_ee(x, ch, sc);
    rep.trace.push_back(F);

    for (int n = 0; n < cfg.newton.max_outer; ++n) {
        RatioParams rp = ratio_params_at(x, sc, ch);
        double asum = rp.alpha.sum();
        SubtractiveProblem pr = make_uc_problem(sc, rp.alpha, rp.beta, tau_lo, fixed);
        DualSolution ds = solve_dual(scaled(pr, 1.0 / asum), sc, ch, cfg.dual, &x);
        rep.inner_iters += ds.iterations;
        ++rep.outer_iters;
        if (!ds.feasible) {
            rep.message = "inner solve returned an infeasible point";
            break;
        }
        double phi_hat = subtractive_value(pr, ds.alloc.tau, ds.alloc.s, sc, ch);
        rep.alpha = rp.alpha;
        rep.beta = rp.beta;
        rep.gap = phi_hat;
        if (phi_hat <= cfg.gap_tol * std::max(1.0, F)) {
            rep.converged = true;
            break;
        }
        // golden-section search of the UC objective on the segment [x, x_hat]
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        auto val = [&](double t) { return uc_ee(blend(x, ds.alloc, t), ch, sc); };
        double lo = 0.0, hi = 1.0;
        double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
        double fc = val(c), fd = val(d);
        for (int it = 0; it < cfg.line_search_iters; ++it) {
            if (fc > fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = val(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = val(d);
            }
        }
        double t_best = 0.0, f_best = F;
        for (auto [t, fv] : {std::pair{1.0, val(1.0)}, std::pair{c, fc}, std::pair{d, fd}})
            if (fv > f_best) {
                f_best = fv;
                t_best = t;
            }
        if (t_best == 0.0) {
            rep.message = "line search made no progress";
            rep.converged = phi_hat <= 1e-6 * std::max(1.0, F);
            break;
        }
        x = blend(x, ds.alloc, t_best);
        F = f_best;
        if (cfg.polish_iters > 0) {
            FlatObjective obj{[&](const VectorXd& z) { return uc_value_flat(z, sc, ch); },
                              [&](const VectorXd& z) { return uc_grad_flat(z, sc, ch); }};
            FaceNewtonConfig fc;
            fc.max_iter = cfg.polish_iters;
            Allocation y = face_newton(x, sc, ch, obj, fixed_time ? VectorXd::Zero(K) : tau_lo, fixed_time, fc);
            double fy = uc_ee(y, ch, sc);
            if (fy > F && residuals(y, ch, sc).max() <= 1e-12) {
                x = y;
                F = fy;
            }
        }
        rep.trace.push_back(F);
    }
    if (!rep.converged && rep.message.empty()) rep.message = "outer iteration cap reached";

    RatioParams fin = ratio_params_at(x, sc, ch);
    rep.alpha = fin.alpha;
    rep.beta = fin.beta;
    rep.psi_norm = psi_norm(psi(x, sc, ch, fin), x, sc);
    rep.alloc = x;
    rep.per_user_ee = user_ee(x, ch, sc);
    rep.uc_ee = uc_ee(x, ch, sc);
    rep.nc_ee = network_ee(x, ch, sc);
    rep.objective = rep.uc_ee;
    return rep;
}

}  // namespace

SolveReport solve_uc_from(const Scenario& sc, const Channel& ch, const UcConfig& cfg, const Allocation& start) {
    auto t0 = Clock::now();
    SolveReport rep;
    rep.scheme = cfg.fixed_time ? "uc-ft" : "uc-opt";
    Allocation x = start;
    if (!cfg.fixed_time)
        for (int k = 0; k < sc.num_users; ++k) x.tau(k) = std::max(x.tau(k), cfg.tau_min);
    x = make_allocation(x.tau, x.s);
    rep = ascend(sc, ch, cfg, x, cfg.fixed_time, rep);
    rep.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
    return rep;
}

namespace {

// Power of user k alone maximizing ln(1 + g x)/(x + pc), all on its strongest port.
VectorXd solo_power(const Scenario& sc, const Channel& ch, int k) {
    Eigen::Index ib;
    ch.h.col(k).maxCoeff(&ib);
    double g = ch.h(ib, k) / sc.noise_power;
    double u = std::exp(1.0 + lambert_w0((g * sc.circuit_power(k) - 1.0) / std::exp(1.0)));
    VectorXd p = VectorXd::Zero(sc.num_ports);
    p(ib) = std::clamp((u - 1.0) / g, 0.0, sc.power_cap(ib));
    return p;
}

// Users in `mask` send at full power, the rest at their solo power. Time shares come from
// the max-min energy slack LP (or are fixed). Empty optional if no feasible split exists.
std::optional<Allocation> source_start(const Scenario& sc, const Channel& ch, unsigned mask, double tau_min,
                                       const VectorXd& fixed_tau) {
    const int N = sc.num_ports, K = sc.num_users;
    MatrixXd P(N, K);
    for (int k = 0; k < K; ++k) P.col(k) = (mask >> k) & 1u ? VectorXd(sc.power_cap) : solo_power(sc, ch, k);
    VectorXd tau;
    if (fixed_tau.size()) {
        tau = fixed_tau;
    } else {
        // t_k = tau_k - tau_min >= 0, d = slack + shift >= 0
        double shift = sc.energy_req.maxCoeff();
        LinearProgram lp;
        lp.A = MatrixXd::Zero(K + 1, K + 1);
        lp.b = VectorXd::Zero(K + 1);
        lp.c = VectorXd::Unit(K + 1, K);
        lp.sense.assign(K + 1, RowSense::ge);
        for (int m = 0; m < K; ++m) {
            double base = 0.0;
            for (int k = 0; k < K; ++k) {
                if (k == m) continue;
                lp.A(m, k) = sc.conversion_eff * ch.h.col(m).dot(P.col(k));
                base += lp.A(m, k) * tau_min;
            }
            lp.A(m, K) = -1.0;
            lp.b(m) = sc.energy_req(m) - base - shift;
        }
        lp.A.row(K).head(K).setConstant(-1.0);
        lp.b(K) = K * tau_min - 1.0;
        LpResult r = solve_lp(lp);
        if (r.status != LpStatus::optimal || r.x(K) < shift) return std::nullopt;
        tau = r.x.head(K).array() + tau_min;
    }
    Allocation a = make_allocation(tau, P * tau.asDiagonal());
    if (residuals(a, ch, sc).max() > 1e-12) return std::nullopt;
    return a;
}

// Feasible source-set starts ranked by their UC-EE, best `count` kept.
std::vector<Allocation> ranked_source_starts(const Scenario& sc, const Channel& ch, double tau_min,
                                             const VectorXd& fixed_tau, int count) {
    const int K = sc.num_users;
    std::vector<std::pair<double, Allocation>> cand;
    if (count <= 0 || K > 12) return {};
    for (unsigned mask = 1; mask + 1 < (1u << K); ++mask) {
        auto a = source_start(sc, ch, mask, tau_min, fixed_tau);
        if (a) cand.emplace_back(uc_ee(*a, ch, sc), std::move(*a));
    }
    std::stable_sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    std::vector<Allocation> out;
    for (int c = 0; c < static_cast<int>(cand.size()) && c < count; ++c) out.push_back(std::move(cand[c].second));
    return out;
}

// Best converged run over the starts (best overall if none converged).
SolveReport best_of(const Scenario& sc, const Channel& ch, const UcConfig& cfg, const std::vector<Allocation>& starts) {
    SolveReport best;
    int outer = 0, inner = 0;
    bool first = true;
    for (const Allocation& st : starts) {
        SolveReport r = solve_uc_from(sc, ch, cfg, st);
        outer += r.outer_iters;
        inner += r.inner_iters;
        if (first || (r.converged && !best.converged) ||
            (r.converged == best.converged && r.objective > best.objective))
            best = std::move(r);
        first = false;
    }
    best.outer_iters = outer;
    best.inner_iters = inner;
    return best;
}

}  // namespace

SolveReport solve_uc(const Scenario& sc, const Channel& ch, const UcConfig& cfg) {
    auto t0 = Clock::now();
    const int K = sc.num_users;
    VectorXd equal = VectorXd::Constant(K, 1.0 / K);
    Feasibility ft = check_feasibility(sc, ch, VectorXd::Zero(K), equal);

    SolveReport rep;
    SolveReport ft_rep;
    if (ft.feasible && (cfg.fixed_time || cfg.warm_start)) {
        std::vector<Allocation> starts{ft.alloc};
        for (Allocation& a : ranked_source_starts(sc, ch, 0.0, equal, cfg.source_starts)) starts.push_back(std::move(a));
        UcConfig fcfg = cfg;
        fcfg.fixed_time = true;
        ft_rep = best_of(sc, ch, fcfg, starts);
    }
    if (cfg.fixed_time) {
        if (!ft.feasible) {
            rep.scheme = "uc-ft";
            rep.feasible = false;
            rep.message = "infeasible with equal time shares";
            return rep;
        }
        ft_rep.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
        return ft_rep;
    }

    std::vector<Allocation> starts;
    if (ft.feasible && cfg.warm_start) starts.push_back(ft_rep.alloc);
    if (starts.empty() || cfg.multi_start) {
        Feasibility fz = check_feasibility(sc, ch, VectorXd::Constant(K, cfg.tau_min), VectorXd());
        if (fz.feasible) starts.push_back(fz.alloc);
        if (cfg.multi_start)
            for (Allocation& a : ranked_source_starts(sc, ch, cfg.tau_min, VectorXd(), cfg.source_starts))
                starts.push_back(std::move(a));
    }
    if (starts.empty()) {
        rep.scheme = "uc-opt";
        rep.feasible = false;
        rep.message = "infeasible instance";
        return rep;
    }
    UcConfig ocfg = cfg;
    ocfg.fixed_time = false;
    rep = best_of(sc, ch, ocfg, starts);
    rep.outer_iters += ft_rep.outer_iters;
    rep.inner_iters += ft_rep.inner_iters;
    rep.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
    return rep;
}

}  // namespace dasee
