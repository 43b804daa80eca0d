#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dasee/lp.hpp"
#include "dasee/model.hpp"

namespace dasee::test {

struct Instance {
    Scenario sc;
    Channel ch;
};

inline Instance random_instance(int n, int k, std::uint64_t seed, double energy_req = 1e-4,
                                double power_cap = 6.0) {
    ScenarioParams p;
    p.num_ports = n;
    p.num_users = k;
    p.energy_req = energy_req;
    p.power_cap = power_cap;
    Instance in;
    in.sc = generate_scenario(p, seed);
    in.ch = generate_channel(in.sc, seed * 7919 + 17);
    return in;
}

// W0 by bisection on w*e^w = x in long double.
inline double lambert_ref(double x) {
    long double lo = -1.0L, hi = x < 1.0 ? 1.0L : std::log(static_cast<long double>(x)) + 1.0L;
    for (int it = 0; it < 400; ++it) {
        long double mid = 0.5L * (lo + hi);
        if (mid * std::exp(mid) < x)
            lo = mid;
        else
            hi = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

// Max of a unimodal f on [lo, hi] by golden section.
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    double best = 0.5 * (lo + hi);
    for (double t : {lo, hi})
        if (f(t) > f(best)) best = t;
    return best;
}

struct VertexOptimum {
    double value = 0.0;
    Eigen::VectorXd x;
};

// Enumerates every basic solution of {A x (sense) b, x >= 0} and keeps the best
// feasible one. Assumes the LP is bounded. Empty if infeasible.
inline std::optional<VertexOptimum> lp_vertex_enum(const LinearProgram& lp, double feas_tol = 1e-9) {
    const int m = static_cast<int>(lp.A.rows()), n = static_cast<int>(lp.A.cols());
    // candidate tight set: rows 0..m-1 and bounds m..m+n-1
    std::vector<int> eq, free_rows;
    for (int r = 0; r < m; ++r) (lp.sense[r] == RowSense::eq ? eq : free_rows).push_back(r);
    for (int j = 0; j < n; ++j) free_rows.push_back(m + j);
    const int need = n - static_cast<int>(eq.size());
    std::optional<VertexOptimum> best;
    if (need < 0) return best;
    std::vector<int> pick(need);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == need) {
            Eigen::MatrixXd M(n, n);
            Eigen::VectorXd rhs(n);
            int row = 0;
            auto put = [&](int c) {
                if (c < m) {
                    M.row(row) = lp.A.row(c);
                    rhs(row) = lp.b(c);
                } else {
                    M.row(row).setZero();
                    M(row, c - m) = 1.0;
                    rhs(row) = 0.0;
                }
                ++row;
            };
            for (int r : eq) put(r);
            for (int c : pick) put(c);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
            if (lu.rank() < n) return;
            Eigen::VectorXd x = lu.solve(rhs);
            double scale = std::max(1.0, lp.b.cwiseAbs().maxCoeff());
            if ((x.array() < -feas_tol * scale).any()) return;
            Eigen::VectorXd ax = lp.A * x;
            for (int r = 0; r < m; ++r) {
                double tol = feas_tol * std::max(1.0, std::abs(lp.b(r)));
                if (lp.sense[r] == RowSense::le && ax(r) > lp.b(r) + tol) return;
                if (lp.sense[r] == RowSense::ge && ax(r) < lp.b(r) - tol) return;
                if (lp.sense[r] == RowSense::eq && std::abs(ax(r) - lp.b(r)) > tol) return;
            }
            double v = lp.c.dot(x);
            if (!best || v > best->value) best = VertexOptimum{v, x};
            return;
        }
        for (int i = start; i < static_cast<int>(free_rows.size()); ++i) {
            pick[depth] = free_rows[i];
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace dasee::test
