#include "dasee/baselines.hpp"

#include <chrono>
#include <cmath>

#include "dasee/errors.hpp"

namespace dasee {

std::string to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::uc_ft: return "uc-ft";
        case BaselineKind::uc_fp: return "uc-fp";
        case BaselineKind::nc_ft: return "nc-ft";
        case BaselineKind::nc_fp: return "nc-fp";
    }
    return "?";
}

SolveReport solve_uc_ft(const Scenario& sc, const Channel& ch, const UcConfig& cfg) {
    UcConfig c = cfg;
    c.fixed_time = true;
    return solve_uc(sc, ch, c);
}

SolveReport solve_nc_ft(const Scenario& sc, const Channel& ch, const NcConfig& cfg) {
    NcConfig c = cfg;
    c.fixed_time = true;
    return solve_nc(sc, ch, c);
}

VectorXd full_power_rates(const Scenario& sc, const Channel& ch) {
    VectorXd r(sc.num_users);
    for (int k = 0; k < sc.num_users; ++k) r(k) = rate_p(sc.power_cap, ch.h.col(k), sc.noise_power);
    return r;
}

VectorXd full_power_costs(const Scenario& sc) {
    return VectorXd::Constant(sc.num_users, sc.power_cap.sum()) + sc.circuit_power;
}

namespace {

// energy delivered to user j per unit time of user k's slot at full power (scaled)
MatrixXd delivery(const Scenario& sc, const Channel& ch, double& scale) {
    const int K = sc.num_users;
    MatrixXd D = MatrixXd::Zero(K, K);
    for (int j = 0; j < K; ++j)
        for (int k = 0; k < K; ++k)
            if (j != k) D(j, k) = sc.conversion_eff * ch.h.col(j).dot(sc.power_cap);
    scale = std::max({D.maxCoeff(), sc.energy_req.maxCoeff(), 1e-300});
    return D / scale;
}

}  // namespace

LinearProgram nc_fp_lp(const Scenario& sc, const Channel& ch, double q) {
    const int K = sc.num_users;
    double scale;
    MatrixXd D = delivery(sc, ch, scale);
    LinearProgram lp;
    lp.A = MatrixXd::Zero(2 * K + 1, K);
    lp.b = VectorXd::Zero(2 * K + 1);
    lp.sense.assign(2 * K + 1, RowSense::le);
    lp.A.topRows(K) = D;
    lp.b.head(K) = sc.energy_req / scale;
    for (int k = 0; k < K; ++k) lp.sense[k] = RowSense::ge;
    lp.A.row(K).setOnes();
    lp.b(K) = 1.0;
    for (int k = 0; k < K; ++k) {
        lp.A(K + 1 + k, k) = 1.0;
        lp.b(K + 1 + k) = 1.0;
    }
    lp.c = sc.weights.cwiseProduct(full_power_rates(sc, ch)) - q * full_power_costs(sc);
    return lp;
}

LinearProgram fp_slack_lp(const Scenario& sc, const Channel& ch, double tau_lo) {
    const int K = sc.num_users;
    double scale;
    MatrixXd D = delivery(sc, ch, scale);
    // variables: tau (K), d+, d-
    LinearProgram lp;
    lp.A = MatrixXd::Zero(2 * K + 2, K + 2);
    lp.b = VectorXd::Zero(2 * K + 2);
    lp.sense.assign(2 * K + 2, RowSense::le);
    lp.A.topLeftCorner(K, K) = D;
    lp.A.block(0, K, K, 1).setConstant(-1.0);
    lp.A.block(0, K + 1, K, 1).setConstant(1.0);
    lp.b.head(K) = sc.energy_req / scale;
    for (int k = 0; k < K; ++k) lp.sense[k] = RowSense::ge;
    lp.A.row(K).head(K).setOnes();
    lp.b(K) = 1.0;
    for (int k = 0; k < K; ++k) {
        lp.A(K + 1 + k, k) = 1.0;
        lp.b(K + 1 + k) = 1.0;
    }
    lp.A(2 * K + 1, K) = 1.0;
    lp.A(2 * K + 1, K + 1) = -1.0;
    lp.b(2 * K + 1) = 1.0;
    lp.c = VectorXd::Zero(K + 2);
    lp.c(K) = 1.0;
    lp.c(K + 1) = -1.0;
    if (tau_lo > 0.0) {
        const int m = static_cast<int>(lp.A.rows());
        lp.A.conservativeResize(m + K, Eigen::NoChange);
        lp.b.conservativeResize(m + K);
        lp.A.bottomRows(K).setZero();
        for (int k = 0; k < K; ++k) {
            lp.A(m + k, k) = 1.0;
            lp.b(m + k) = tau_lo;
            lp.sense.push_back(RowSense::ge);
        }
    }
    return lp;
}

namespace {

Allocation full_power_alloc(const Scenario& sc, const VectorXd& tau) {
    Allocation a;
    a.tau = tau;
    a.s = sc.power_cap * tau.transpose();
    a.p = recover_power(a.tau, a.s);
    return a;
}

}  // namespace

SolveReport solve_uc_fp(const Scenario& sc, const Channel& ch, double tau_lo) {
    auto t0 = std::chrono::steady_clock::now();
    const int K = sc.num_users;
    SolveReport rep;
    rep.scheme = "uc-fp";
    auto slack_ok = [&](const LpResult& r) { return r.status == LpStatus::optimal && r.x(K) - r.x(K + 1) >= -1e-12; };
    LpResult r = solve_lp(fp_slack_lp(sc, ch, tau_lo));
    if (!slack_ok(r)) r = solve_lp(fp_slack_lp(sc, ch));
    if (!slack_ok(r)) {
        rep.feasible = false;
        rep.message = "infeasible at full power";
        return rep;
    }
    rep.alloc = full_power_alloc(sc, r.x.head(K));
    rep.per_user_ee = user_ee(rep.alloc, ch, sc);
    rep.uc_ee = uc_ee(rep.alloc, ch, sc);
    rep.nc_ee = network_ee(rep.alloc, ch, sc);
    rep.objective = rep.uc_ee;
    rep.converged = true;
    rep.outer_iters = 1;
    rep.inner_iters = r.iterations;
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

SolveReport solve_nc_fp(const Scenario& sc, const Channel& ch, double tol, int max_iter) {
    auto t0 = std::chrono::steady_clock::now();
    const int K = sc.num_users;
    SolveReport rep;
    rep.scheme = "nc-fp";
    LpResult r0 = solve_lp(fp_slack_lp(sc, ch));
    if (r0.status != LpStatus::optimal || r0.x(K) - r0.x(K + 1) < -1e-12) {
        rep.feasible = false;
        rep.message = "infeasible at full power";
        return rep;
    }
    VectorXd rr = sc.weights.cwiseProduct(full_power_rates(sc, ch));
    VectorXd cc = full_power_costs(sc);
    VectorXd tau = r0.x.head(K);
    double q = rr.dot(tau) / cc.dot(tau);
    rep.trace.push_back(q);
    for (int it = 0; it < max_iter; ++it) {
        LpResult r = solve_lp(nc_fp_lp(sc, ch, q));
        ++rep.outer_iters;
        rep.inner_iters += r.iterations;
        if (r.status != LpStatus::optimal) throw NumericalFailure("solve_nc_fp: LP failed");
        double T = r.value;
        rep.t_residual = std::abs(T);
        if (cc.dot(r.x) > 0.0 && rr.dot(r.x) / cc.dot(r.x) >= q) tau = r.x;
        if (T <= tol * std::max(1.0, q)) {
            rep.converged = true;
            break;
        }
        q = rr.dot(r.x) / cc.dot(r.x);
        rep.trace.push_back(q);
    }
    rep.alloc = full_power_alloc(sc, tau);
    rep.per_user_ee = user_ee(rep.alloc, ch, sc);
    rep.uc_ee = uc_ee(rep.alloc, ch, sc);
    rep.nc_ee = network_ee(rep.alloc, ch, sc);
    rep.objective = rep.nc_ee;
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace dasee
