#include "dasee/nc_solver.hpp"

#include <chrono>
#include <cmath>

#include "dasee/errors.hpp"

namespace dasee {

namespace {

VectorXd equal_split(int K) { return VectorXd::Constant(K, 1.0 / K); }

double weighted_rate(const Allocation& a, const Scenario& sc, const Channel& ch) {
    double v = 0.0;
    for (int k = 0; k < sc.num_users; ++k)
        v += sc.weights(k) * rate(a.tau(k), a.s.col(k), ch.h.col(k), sc.noise_power);
    return v;
}

double total_energy(const Allocation& a, const Scenario& sc) {
    return a.s.sum() + a.tau.dot(sc.circuit_power);
}

}  // namespace

TofQ t_of_q(const Scenario& sc, const Channel& ch, double q, const NcConfig& cfg, const Allocation* anchor) {
    const int K = sc.num_users;
    VectorXd fixed = cfg.fixed_time ? equal_split(K) : VectorXd();
    SubtractiveProblem pr = make_nc_problem(sc, q, VectorXd::Zero(K), fixed);
    DualSolution ds = solve_dual(pr, sc, ch, cfg.dual, anchor);
    TofQ out;
    out.alloc = ds.alloc;
    out.value = ds.primal_value;
    out.bound = ds.dual_value;
    out.inner_iters = ds.iterations;
    out.feasible = ds.feasible;
    return out;
}

SolveReport solve_nc(const Scenario& sc, const Channel& ch, const NcConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    const int K = sc.num_users;
    SolveReport rep;
    rep.scheme = cfg.fixed_time ? "nc-ft" : "nc-opt";

    Feasibility fz = cfg.fixed_time ? check_feasibility(sc, ch, VectorXd::Zero(K), equal_split(K))
                                    : check_feasibility(sc, ch);
    if (!fz.feasible) {
        rep.feasible = false;
        rep.message = "infeasible instance";
        return rep;
    }
    Allocation x = fz.alloc;
    double q = network_ee(x, ch, sc);
    rep.trace.push_back(q);

    for (int it = 0; it < cfg.max_iter; ++it) {
        TofQ t = t_of_q(sc, ch, q, cfg, &x);
        if (!t.feasible) {
            rep.message = "inner solve returned an infeasible point";
            break;
        }
        ++rep.outer_iters;
        rep.inner_iters += t.inner_iters;
        rep.t_residual = std::abs(t.value);
        double den = total_energy(t.alloc, sc);
        double qn = den > 0.0 ? weighted_rate(t.alloc, sc, ch) / den : 0.0;
        if (qn >= q) {
            x = t.alloc;
        }
        if (std::abs(t.value) < cfg.tol) {
            rep.converged = t.bound < cfg.bound_tol;
            if (!rep.converged) rep.message = "dual bound on T(q) not closed";
            break;
        }
        if (qn <= q) {
            rep.message = "ratio stopped increasing";
            break;
        }
        q = qn;
        rep.trace.push_back(q);
    }
    if (!rep.converged && rep.message.empty()) rep.message = "iteration cap reached";

    rep.alloc = x;
    rep.per_user_ee = user_ee(x, ch, sc);
    rep.uc_ee = uc_ee(x, ch, sc);
    rep.nc_ee = network_ee(x, ch, sc);
    rep.objective = rep.nc_ee;
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace dasee
