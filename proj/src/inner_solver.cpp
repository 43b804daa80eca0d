#include "dasee/inner_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <vector>

#include "dasee/errors.hpp"
#include "dasee/face_newton.hpp"
#include "dasee/lp.hpp"
#include "dasee/special_functions.hpp"

namespace dasee {

SubtractiveProblem make_uc_problem(const Scenario& sc, const VectorXd& alpha, const VectorXd& beta,
                                   const VectorXd& tau_lo, const VectorXd& fixed_tau) {
    SubtractiveProblem pr;
    VectorXd ab = alpha.cwiseProduct(beta);
    pr.log_weight = alpha.cwiseProduct(sc.weights);
    pr.s_coef = -MatrixXd::Ones(sc.num_ports, 1) * ab.transpose();
    pr.tau_coef = -ab.cwiseProduct(sc.circuit_power);
    pr.tau_lo = tau_lo;
    pr.fixed_tau = fixed_tau;
    return pr;
}

SubtractiveProblem make_nc_problem(const Scenario& sc, double q, const VectorXd& tau_lo,
                                   const VectorXd& fixed_tau) {
    SubtractiveProblem pr;
    pr.log_weight = sc.weights;
    pr.s_coef = MatrixXd::Constant(sc.num_ports, sc.num_users, -q);
    pr.tau_coef = -q * sc.circuit_power;
    pr.tau_lo = tau_lo;
    pr.fixed_tau = fixed_tau;
    return pr;
}

SubtractiveProblem scaled(SubtractiveProblem pr, double factor) {
    pr.log_weight *= factor;
    pr.s_coef *= factor;
    pr.tau_coef *= factor;
    return pr;
}

double subtractive_value(const SubtractiveProblem& pr, const VectorXd& tau, const MatrixXd& s,
                         const Scenario& sc, const Channel& ch) {
    double v = 0.0;
    for (int k = 0; k < sc.num_users; ++k) {
        if (pr.log_weight(k) != 0.0) v += pr.log_weight(k) * rate(tau(k), s.col(k), ch.h.col(k), sc.noise_power);
        v += pr.s_coef.col(k).dot(s.col(k)) + pr.tau_coef(k) * tau(k);
    }
    return v;
}

DualState DualState::zeros(int n, int k) { return {VectorXd::Zero(k), MatrixXd::Zero(n, k), 0.0}; }

VectorXd DualState::pack() const {
    const int K = static_cast<int>(mu.size()), N = static_cast<int>(upsilon.rows());
    VectorXd z(K + N * K + 1);
    z.head(K) = mu;
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < K; ++k) z(K + i * K + k) = upsilon(i, k);
    z(K + N * K) = lambda;
    return z;
}

DualState DualState::unpack(const VectorXd& z, int n, int k) {
    DualState d = zeros(n, k);
    d.mu = z.head(k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) d.upsilon(i, j) = z(k + i * k + j);
    d.lambda = z(k + n * k);
    return d;
}

LinearOffsets make_offsets(const SubtractiveProblem& pr, const DualState& d, const Scenario& sc,
                           const Channel& ch) {
    const int K = sc.num_users;
    LinearOffsets off;
    off.log_weight = pr.log_weight;
    VectorXd hm = ch.h * d.mu;
    off.B = pr.s_coef - d.upsilon;
    for (int k = 0; k < K; ++k) off.B.col(k) += sc.conversion_eff * (hm - d.mu(k) * ch.h.col(k));
    off.A = pr.tau_coef + d.upsilon.transpose() * sc.power_cap;
    if (!pr.fixed()) off.A.array() -= d.lambda;
    return off;
}

double lagrangian(const SubtractiveProblem& pr, const DualState& d, const VectorXd& tau, const MatrixXd& s,
                  const Scenario& sc, const Channel& ch) {
    double v = subtractive_value(pr, tau, s, sc, ch);
    v += d.mu.dot(harvested_energy(s, ch, sc.conversion_eff) - sc.energy_req);
    for (int k = 0; k < sc.num_users; ++k)
        v += d.upsilon.col(k).dot(tau(k) * sc.power_cap - s.col(k));
    if (!pr.fixed()) v += d.lambda * (1.0 - tau.sum());
    return v;
}

double dL_dtau(int k, const VectorXd& tau, const MatrixXd& s, const LinearOffsets& off, const Channel& ch,
               double sigma2) {
    double x = ch.h.col(k).dot(s.col(k));
    double y = x / (sigma2 * tau(k));
    return off.log_weight(k) * (std::log1p(y) - y / (1.0 + y)) + off.A(k);
}

double d2L_dtau2(int k, const VectorXd& tau, const MatrixXd& s, const LinearOffsets& off, const Channel& ch,
                 double sigma2) {
    double x = ch.h.col(k).dot(s.col(k));
    double t = tau(k);
    double den = t * sigma2 + x;
    return -off.log_weight(k) * x * x / (t * den * den);
}

double dL_ds(int i, int k, const VectorXd& tau, const MatrixXd& s, const LinearOffsets& off, const Channel& ch,
             double sigma2) {
    double x = ch.h.col(k).dot(s.col(k));
    return off.log_weight(k) * tau(k) * ch.h(i, k) / (tau(k) * sigma2 + x) + off.B(i, k);
}

double tau_update(int k, const VectorXd& s_col, const VectorXd& h_col, const LinearOffsets& off, double sigma2,
                  double lo, double hi) {
    double x = h_col.dot(s_col);
    double W = off.log_weight(k);
    double A = off.A(k);
    if (x <= 0.0 || W <= 0.0) return A > 0.0 ? hi : lo;
    if (A >= 0.0) return hi;
    double a = A / W;
    double v = 1.0 - a + lambert_w0(-std::exp(a - 1.0));
    double y = std::expm1(v);
    if (!(y > 0.0)) return hi;
    double t = x / (sigma2 * y);
    return std::clamp(t, lo, hi);
}

double s_update(int i, int k, const MatrixXd& s, double tau_k, const VectorXd& h_col, const LinearOffsets& off,
                double sigma2, double cap) {
    if (tau_k <= 0.0) return 0.0;
    double coef = off.B(i, k);
    double ub = tau_k * cap;
    if (coef >= 0.0) return ub;
    if (h_col(i) <= 0.0) return 0.0;
    double rest = h_col.dot(s.col(k)) - h_col(i) * s(i, k);
    double v = -off.log_weight(k) * tau_k / coef - (tau_k * sigma2 + rest) / h_col(i);
    return std::clamp(v, 0.0, ub);
}

VectorXd box_maximize(double a, const VectorXd& g, const VectorXd& B, const VectorXd& cap) {
    const int n = static_cast<int>(g.size());
    VectorXd p = VectorXd::Zero(n);
    double x = 0.0;
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
        if (B(i) >= 0.0) {
            p(i) = cap(i);
            x += g(i) * cap(i);
        } else if (g(i) > 0.0 && cap(i) > 0.0) {
            idx.push_back(i);
        }
    }
    if (a <= 0.0) return p;
    std::sort(idx.begin(), idx.end(), [&](int u, int v) { return -B(u) / g(u) < -B(v) / g(v); });
    for (int i : idx) {
        double cost = -B(i) / g(i);
        double xs = a / cost - 1.0;
        if (xs <= x) break;
        double add = std::min(cap(i), (xs - x) / g(i));
        p(i) = add;
        x += g(i) * add;
        if (add < cap(i)) break;
    }
    return p;
}

BcdResult bcd_maximize(const SubtractiveProblem& pr, const DualState& d, const Scenario& sc, const Channel& ch,
                       const VectorXd& tau0, const MatrixXd& s0, const BcdConfig& cfg) {
    const int N = sc.num_ports, K = sc.num_users;
    LinearOffsets off = make_offsets(pr, d, sc, ch);
    BcdResult r;
    r.tau = pr.fixed() ? pr.fixed_tau : tau0;
    r.s = s0;
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < N; ++i) r.s(i, k) = std::clamp(r.s(i, k), 0.0, r.tau(k) * sc.power_cap(i));
    double prev = lagrangian(pr, d, r.tau, r.s, sc, ch);
    r.trace.push_back(prev);
    for (int pass = 1; pass <= cfg.max_passes; ++pass) {
        if (!pr.fixed()) {
            for (int k = 0; k < K; ++k) {
                double lo = pr.tau_lo.size() ? pr.tau_lo(k) : 0.0;
                for (int i = 0; i < N; ++i)
                    if (sc.power_cap(i) > 0.0) lo = std::max(lo, r.s(i, k) / sc.power_cap(i));
                r.tau(k) = tau_update(k, r.s.col(k), ch.h.col(k), off, sc.noise_power, std::min(lo, 1.0), 1.0);
            }
        }
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < K; ++k)
                r.s(i, k) = s_update(i, k, r.s, r.tau(k), ch.h.col(k), off, sc.noise_power, sc.power_cap(i));
        double cur = lagrangian(pr, d, r.tau, r.s, sc, ch);
        r.trace.push_back(cur);
        r.passes = pass;
        double gain = cur - prev;
        prev = cur;
        if (gain < cfg.tol_abs || gain < cfg.tol_rel * std::abs(cur)) {
            r.converged = true;
            break;
        }
    }
    r.value = prev;
    return r;
}

VectorXd dual_subgradient(const Allocation& a, const Scenario& sc, const Channel& ch) {
    const int N = sc.num_ports, K = sc.num_users;
    VectorXd g(K + N * K + 1);
    g.head(K) = harvested_energy(a.s, ch, sc.conversion_eff) - sc.energy_req;
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < K; ++k) g(K + i * K + k) = sc.power_cap(i) * a.tau(k) - a.s(i, k);
    g(K + N * K) = 1.0 - a.tau.sum();
    return g;
}

namespace {

double log_det_spd(const MatrixXd& A) {
    Eigen::LLT<MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

EllipsoidResult ellipsoid_run(const DualObjective& f, const VectorXd& z0, double radius,
                              const EllipsoidConfig& cfg) {
    const int n = static_cast<int>(z0.size());
    const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 2000 * n;
    EllipsoidResult res;
    VectorXd z = z0;
    MatrixXd A = MatrixXd::Identity(n, n) * radius * radius;
    VectorXd g(n);
    double best = std::numeric_limits<double>::infinity();
    res.z = z0;
    if (cfg.record_logdet) res.logdet.push_back(2.0 * n * std::log(radius));

    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        double hcut = 0.0;
        int neg = -1;
        if (cfg.nonnegative) {
            double most = 0.0;
            for (int j = 0; j < n; ++j)
                if (z(j) < most) {
                    most = z(j);
                    neg = j;
                }
        }
        if (neg >= 0) {
            g.setZero();
            g(neg) = -1.0;
            hcut = -z(neg);
        } else {
            double val = f(z, g);
            ++res.evaluations;
            if (val < best) {
                best = val;
                res.z = z;
                res.value = val;
            }
            double gAg = g.dot(A * g);
            double stop = cfg.tol * std::max(1.0, std::abs(best));
            if (!(gAg > stop * stop)) {
                res.converged = true;
                break;
            }
            hcut = val - best;
        }
        VectorXd Ag = A * g;
        double gAg = g.dot(Ag);
        if (!(gAg > 0.0)) throw NumericalFailure("ellipsoid: shape matrix lost positive definiteness");
        double sq = std::sqrt(gAg);
        if (n == 1) {
            double r = std::sqrt(A(0, 0));
            double lo = z(0) - r, hi = z(0) + r;
            double bound = z(0) - hcut / g(0);
            if (g(0) > 0.0)
                hi = std::min(hi, bound);
            else
                lo = std::max(lo, bound);
            if (hi < lo) hi = lo;
            z(0) = 0.5 * (lo + hi);
            A(0, 0) = std::max(0.25 * (hi - lo) * (hi - lo), 1e-300);
        } else {
            double al = std::clamp(hcut / sq, 0.0, 0.999);
            double nn = n;
            z -= (1.0 + nn * al) / (nn + 1.0) * Ag / sq;
            A = (nn * nn * (1.0 - al * al) / (nn * nn - 1.0)) *
                (A - (2.0 * (1.0 + nn * al) / ((nn + 1.0) * (1.0 + al))) * (Ag * Ag.transpose()) / gAg);
            A = 0.5 * (A + A.transpose());
        }
        if (!z.allFinite() || !A.allFinite() || (A.diagonal().array() <= 0.0).any())
            throw NumericalFailure("ellipsoid: shape matrix lost positive definiteness");
        if (cfg.record_logdet) {
            double ld = log_det_spd(A);
            if (std::isnan(ld)) throw NumericalFailure("ellipsoid: Cholesky of shape matrix failed");
            res.logdet.push_back(ld);
        }
    }
    return res;
}

}  // namespace

EllipsoidResult ellipsoid_minimize(const DualObjective& f, const VectorXd& z0, double radius,
                                   const EllipsoidConfig& cfg) {
    EllipsoidResult res = ellipsoid_run(f, z0, radius, cfg);
    int restarts = 0;
    int total_it = res.iterations, total_ev = res.evaluations;
    while (restarts < cfg.max_restarts && (res.z - z0).norm() > 0.5 * radius) {
        radius *= cfg.restart_factor;
        ++restarts;
        EllipsoidResult r = ellipsoid_run(f, z0, radius, cfg);
        total_it += r.iterations;
        total_ev += r.evaluations;
        if (r.value <= res.value || !std::isfinite(res.value)) res = std::move(r);
    }
    res.iterations = total_it;
    res.evaluations = total_ev;
    res.restarts = restarts;
    return res;
}

namespace {

struct InnerPoint {
    VectorXd tau;
    MatrixXd s;
    VectorXd cons;  // energy slack (K) and time slack (1 if free)
    double phi = 0.0;
};

VectorXd constraint_slack(const SubtractiveProblem& pr, const VectorXd& tau, const MatrixXd& s,
                          const Scenario& sc, const Channel& ch) {
    const int K = sc.num_users;
    VectorXd c(pr.fixed() ? K : K + 1);
    c.head(K) = harvested_energy(s, ch, sc.conversion_eff) - sc.energy_req;
    if (!pr.fixed()) c(K) = 1.0 - tau.sum();
    return c;
}

// Column LP over (user, power shape) pairs taken from the history: variable theta_kc is
// the time user k spends at power p_c. phi at the assembled point is at least the LP value.
bool recover(const SubtractiveProblem& pr, const std::deque<InnerPoint>& hist, const Scenario& sc,
             const Channel& ch, VectorXd& tau, MatrixXd& s) {
    const int N = sc.num_ports, K = sc.num_users;
    const bool fixed = pr.fixed();
    std::vector<int> user;
    std::vector<VectorXd> shape;
    for (int k = 0; k < K; ++k) {
        user.push_back(k);
        shape.push_back(VectorXd::Zero(N));
    }
    for (const InnerPoint& ip : hist)
        for (int k = 0; k < K; ++k) {
            if (ip.tau(k) <= 0.0 || ip.s.col(k).maxCoeff() <= 0.0) continue;
            VectorXd p = (ip.s.col(k) / ip.tau(k)).cwiseMax(0.0).cwiseMin(sc.power_cap);
            bool dup = false;
            for (std::size_t c = K; c < shape.size() && !dup; ++c) dup = user[c] == k && shape[c] == p;
            if (dup) continue;
            user.push_back(k);
            shape.push_back(std::move(p));
        }
    const int C = static_cast<int>(user.size());
    const int rows = 2 * K + (fixed ? 0 : 1);
    LinearProgram lp;
    lp.A = MatrixXd::Zero(rows, C);
    lp.b = VectorXd::Zero(rows);
    lp.c = VectorXd::Zero(C);
    lp.sense.assign(rows, RowSense::ge);
    VectorXd tau_lo = pr.tau_lo.size() ? pr.tau_lo : VectorXd::Zero(K);
    for (int c = 0; c < C; ++c) {
        int k = user[c];
        const VectorXd& p = shape[c];
        lp.c(c) = pr.log_weight(k) * std::log1p(ch.h.col(k).dot(p) / sc.noise_power) + pr.s_coef.col(k).dot(p) +
                  pr.tau_coef(k);
        for (int m = 0; m < K; ++m)
            if (m != k) lp.A(m, c) = sc.conversion_eff * ch.h.col(m).dot(p);
        lp.A(K + k, c) = 1.0;
        if (!fixed) lp.A(2 * K, c) = 1.0;
    }
    lp.b.head(K) = sc.energy_req;
    for (int k = 0; k < K; ++k) {
        if (fixed) {
            lp.b(K + k) = pr.fixed_tau(k);
            lp.sense[K + k] = RowSense::eq;
        } else {
            lp.b(K + k) = tau_lo(k);
        }
    }
    if (!fixed) {
        lp.b(2 * K) = 1.0;
        lp.sense[2 * K] = RowSense::le;
    }
    double cscale = lp.c.cwiseAbs().maxCoeff();
    if (cscale > 0.0) lp.c /= cscale;
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::optimal) return false;
    tau = VectorXd::Zero(K);
    s = MatrixXd::Zero(N, K);
    for (int c = 0; c < C; ++c) {
        double th = std::max(res.x(c), 0.0);
        if (th == 0.0) continue;
        tau(user[c]) += th;
        s.col(user[c]) += th * shape[c];
    }
    if (fixed) tau = pr.fixed_tau;
    return true;
}

double default_radius(const SubtractiveProblem& pr, const Scenario& sc, const Channel& ch) {
    double scale = std::max({1.0, pr.log_weight.cwiseAbs().maxCoeff(), pr.s_coef.cwiseAbs().maxCoeff(),
                             pr.tau_coef.cwiseAbs().maxCoeff()});
    std::vector<double> hv(ch.h.data(), ch.h.data() + ch.h.size());
    std::sort(hv.begin(), hv.end());
    double hmed = hv[hv.size() / 2];
    double escale = sc.conversion_eff * std::max(hmed, 1e-300);
    return 10.0 * scale * std::max(1.0, 1.0 / escale);
}

}  // namespace

namespace {

VectorXd subtractive_grad_flat(const SubtractiveProblem& pr, const VectorXd& z, const Scenario& sc,
                               const Channel& ch) {
    const int N = sc.num_ports, K = sc.num_users;
    VectorXd g(z.size());
    for (int k = 0; k < K; ++k) {
        double tau = z(k), x = 0.0;
        for (int i = 0; i < N; ++i) x += ch.h(i, k) * z(K + k * N + i);
        double y = tau > 0.0 ? x / (sc.noise_power * tau) : 0.0;
        double lw = pr.log_weight(k);
        g(k) = lw * (std::log1p(y) - y / (1.0 + y)) + pr.tau_coef(k);
        for (int i = 0; i < N; ++i)
            g(K + k * N + i) = lw * ch.h(i, k) / (sc.noise_power * (1.0 + y)) + pr.s_coef(i, k);
    }
    return g;
}

}  // namespace

DualSolution solve_dual(const SubtractiveProblem& pr, const Scenario& sc, const Channel& ch,
                        const DualConfig& cfg, const Allocation* anchor) {
    const int N = sc.num_ports, K = sc.num_users;
    const bool fixed = pr.fixed();
    const bool full = cfg.mode == DualMode::full;
    const double sigma2 = sc.noise_power;
    const int dim = full ? (K + N * K + 1) : (fixed ? K : K + 1);
    const int hist_cap = cfg.history > 0 ? cfg.history : std::max(100, 20 * dim);
    VectorXd tau_lo = pr.tau_lo.size() ? pr.tau_lo : VectorXd::Zero(K);

    std::deque<InnerPoint> hist;
    MatrixXd G = ch.h / sigma2;
    // warm start for the coordinate ascent in full mode
    VectorXd bcd_tau = fixed ? pr.fixed_tau : VectorXd::Constant(K, 0.5);
    MatrixXd bcd_s = 0.5 * sc.power_cap * bcd_tau.transpose();
    int eval_count = 0;

    auto unpack = [&](const VectorXd& z) {
        DualState d = DualState::zeros(N, K);
        if (full) {
            d = DualState::unpack(z, N, K);
        } else {
            d.mu = z.head(K);
            if (!fixed) d.lambda = z(K);
        }
        return d;
    };

    DualObjective f = [&](const VectorXd& z, VectorXd& grad) {
        DualState d = unpack(z);
        VectorXd tau(K);
        MatrixXd s(N, K);
        double gval;
        if (full) {
            VectorXd t0 = bcd_tau;
            MatrixXd s0 = bcd_s;
            // restart from a strictly positive point; zero is a fixed point of the sweeps
            for (int k = 0; k < K; ++k) {
                if (!fixed) t0(k) = std::max(t0(k), 0.05);
                for (int i = 0; i < N; ++i) s0(i, k) = std::max(s0(i, k), 0.05 * t0(k) * sc.power_cap(i));
            }
            BcdResult b = bcd_maximize(pr, d, sc, ch, t0, s0, cfg.bcd);
            tau = b.tau;
            s = b.s;
            gval = b.value;
            bcd_tau = tau;
            bcd_s = s;
        } else {
            LinearOffsets off = make_offsets(pr, d, sc, ch);
            gval = fixed ? 0.0 : d.lambda;
            gval -= d.mu.dot(sc.energy_req);
            for (int k = 0; k < K; ++k) {
                VectorXd p = box_maximize(off.log_weight(k), G.col(k), off.B.col(k), sc.power_cap);
                double V = off.log_weight(k) * std::log1p(G.col(k).dot(p)) + off.B.col(k).dot(p) + off.A(k);
                double t = fixed ? pr.fixed_tau(k) : (V > 0.0 ? 1.0 : tau_lo(k));
                tau(k) = t;
                s.col(k) = t * p;
                gval += t * V;
            }
        }
        Allocation a{tau, s, MatrixXd()};
        VectorXd full_g = dual_subgradient(a, sc, ch);
        if (full) {
            grad = full_g;
            if (fixed) grad(K + N * K) = 0.0;
        } else {
            grad.resize(dim);
            grad.head(K) = full_g.head(K);
            if (!fixed) grad(K) = full_g(K + N * K);
        }
        InnerPoint ip{tau, s, constraint_slack(pr, tau, s, sc, ch), subtractive_value(pr, tau, s, sc, ch)};
        hist.push_back(std::move(ip));
        if (static_cast<int>(hist.size()) > hist_cap) hist.pop_front();
        ++eval_count;
        if (cfg.trace) *cfg.trace << eval_count << ',' << gval << ',' << z.norm() << '\n';
        return gval;
    };

    double radius = cfg.radius > 0.0 ? cfg.radius : default_radius(pr, sc, ch);
    VectorXd z0 = VectorXd::Constant(dim, 1e-3);
    if (full && fixed) z0(dim - 1) = 0.0;
    EllipsoidResult er = ellipsoid_minimize(f, z0, radius, cfg.ellipsoid);

    DualSolution out;
    out.duals = unpack(er.z);
    out.dual_value = er.value;
    out.iterations = er.iterations;
    out.evaluations = er.evaluations;
    out.converged = er.converged;

    VectorXd tau;
    MatrixXd s;
    if (anchor) {
        VectorXd at = anchor->tau;
        if (fixed) at = pr.fixed_tau;
        hist.push_back({at, anchor->s, constraint_slack(pr, at, anchor->s, sc, ch),
                        subtractive_value(pr, at, anchor->s, sc, ch)});
    }
    out.recovered = recover(pr, hist, sc, ch, tau, s);
    if (!out.recovered) {
        tau = hist.back().tau;
        s = hist.back().s;
    }
    for (int k = 0; k < K; ++k) {
        if (!fixed) tau(k) = std::clamp(tau(k), tau_lo(k), 1.0);
        for (int i = 0; i < N; ++i) s(i, k) = std::clamp(s(i, k), 0.0, tau(k) * sc.power_cap(i));
    }
    if (!fixed && tau.sum() > 1.0) {
        double f = 1.0 / tau.sum();
        tau *= f;
        s *= f;
    }
    out.alloc = make_allocation(tau, s);
    out.primal_value = subtractive_value(pr, tau, s, sc, ch);
    VectorXd slack = constraint_slack(pr, tau, s, sc, ch);
    out.feasible = true;
    for (int k = 0; k < K; ++k)
        out.feasible = out.feasible && slack(k) >= -1e-6 * std::max(sc.energy_req(k), 1e-12);
    if (!fixed) out.feasible = out.feasible && slack(K) >= -1e-12;

    if (out.feasible && cfg.polish_iters > 0) {
        FlatObjective obj{[&](const VectorXd& z) {
                              Allocation a = unpack_flat(z, N, K);
                              return subtractive_value(pr, a.tau, a.s, sc, ch);
                          },
                          [&](const VectorXd& z) { return subtractive_grad_flat(pr, z, sc, ch); }};
        FaceNewtonConfig fc;
        fc.max_iter = cfg.polish_iters;
        Allocation y = face_newton(out.alloc, sc, ch, obj, fixed ? VectorXd::Zero(K) : tau_lo, fixed, fc);
        double vy = subtractive_value(pr, y.tau, y.s, sc, ch);
        if (vy > out.primal_value) {
            out.alloc = y;
            out.primal_value = vy;
        }
    }
    return out;
}

}  // namespace dasee
