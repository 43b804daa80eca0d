#include "dasee/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dasee {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Revised simplex on  M z = b, z >= 0  with an explicit basis, refactorized every step.
struct Revised {
    MatrixXd M;
    VectorXd b;
    std::vector<int> basis;
    std::vector<char> banned;
    int iters = 0;

    VectorXd basic_values() const {
        MatrixXd B(M.rows(), M.rows());
        for (int i = 0; i < M.rows(); ++i) B.col(i) = M.col(basis[i]);
        return Eigen::PartialPivLU<MatrixXd>(B).solve(b);
    }

    LpStatus run(const VectorXd& cost, double tol, int max_iter) {
        const int m = static_cast<int>(M.rows()), n = static_cast<int>(M.cols());
        std::vector<char> in_basis(n, 0);
        int degenerate = 0;
        for (;;) {
            if (iters >= max_iter) return LpStatus::iteration_limit;
            std::fill(in_basis.begin(), in_basis.end(), 0);
            MatrixXd B(m, m);
            VectorXd cb(m);
            for (int i = 0; i < m; ++i) {
                B.col(i) = M.col(basis[i]);
                cb(i) = cost(basis[i]);
                in_basis[basis[i]] = 1;
            }
            Eigen::PartialPivLU<MatrixXd> lu(B);
            VectorXd xb = lu.solve(b);
            VectorXd y = Eigen::PartialPivLU<MatrixXd>(B.transpose()).solve(cb);
            VectorXd d = cost - M.transpose() * y;

            // Dantzig pricing; Bland's rule after a run of degenerate pivots
            int q = -1;
            const bool bland = degenerate > 2 * m;
            for (int j = 0; j < n; ++j) {
                if (in_basis[j] || banned[j]) continue;
                double dj = d(j) / std::max(1.0, M.col(j).cwiseAbs().maxCoeff());
                if (dj <= tol) continue;
                if (q < 0) {
                    q = j;
                    if (bland) break;
                } else if (d(j) / std::max(1.0, M.col(q).cwiseAbs().maxCoeff()) < dj) {
                    q = j;
                }
            }
            if (q < 0) return LpStatus::optimal;

            VectorXd w = lu.solve(M.col(q));
            const double piv = 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff());
            const double slack = 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff());
            // Harris two-pass ratio test
            double theta_max = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i)
                if (w(i) > piv) theta_max = std::min(theta_max, (std::max(xb(i), 0.0) + slack) / w(i));
            if (!std::isfinite(theta_max)) return LpStatus::unbounded;
            int r = -1;
            for (int i = 0; i < m; ++i) {
                if (w(i) <= piv || std::max(xb(i), 0.0) / w(i) > theta_max) continue;
                if (r < 0 || w(i) > w(r) || (w(i) == w(r) && basis[i] < basis[r])) r = i;
            }
            double theta = std::max(xb(r), 0.0) / w(r);
            degenerate = theta <= 1e-14 ? degenerate + 1 : 0;
            basis[r] = q;
            ++iters;
        }
    }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, double tol, int max_iter) {
    const int m = static_cast<int>(lp.A.rows());
    const int nx = static_cast<int>(lp.A.cols());
    if (lp.b.size() != m || static_cast<int>(lp.sense.size()) != m || lp.c.size() != nx)
        throw std::invalid_argument("solve_lp: dimension mismatch");

    LpResult res;
    res.x = VectorXd::Zero(nx);
    if (m == 0) {
        if ((lp.c.array() > 0).any()) {
            res.status = LpStatus::unbounded;
            return res;
        }
        res.status = LpStatus::optimal;
        return res;
    }

    // normalized rows with b >= 0
    MatrixXd A = lp.A;
    VectorXd b = lp.b;
    std::vector<RowSense> sense = lp.sense;
    for (int i = 0; i < m; ++i) {
        double r = A.row(i).cwiseAbs().maxCoeff();
        if (r > 0.0) {
            A.row(i) /= r;
            b(i) /= r;
        }
        if (b(i) < 0.0) {
            A.row(i) *= -1.0;
            b(i) = -b(i);
            if (sense[i] != RowSense::eq) sense[i] = sense[i] == RowSense::le ? RowSense::ge : RowSense::le;
        }
    }
    int n_slack = 0, n_art = 0;
    for (auto s : sense) {
        if (s != RowSense::eq) ++n_slack;
        if (s != RowSense::le) ++n_art;
    }
    const int art0 = nx + n_slack, n = art0 + n_art;

    Revised rs;
    rs.M = MatrixXd::Zero(m, n);
    rs.M.leftCols(nx) = A;
    rs.b = b;
    rs.basis.assign(m, -1);
    rs.banned.assign(n, 0);
    int js = nx, ja = art0;
    for (int i = 0; i < m; ++i) {
        if (sense[i] == RowSense::le) {
            rs.M(i, js) = 1.0;
            rs.basis[i] = js++;
        } else {
            if (sense[i] == RowSense::ge) rs.M(i, js++) = -1.0;
            rs.M(i, ja) = 1.0;
            rs.basis[i] = ja++;
        }
    }

    const double feas_tol = 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff());
    if (n_art > 0) {
        VectorXd c1 = VectorXd::Zero(n);
        c1.tail(n_art).setConstant(-1.0);
        LpStatus st = rs.run(c1, tol, max_iter);
        if (st == LpStatus::iteration_limit) {
            res.status = st;
            res.iterations = rs.iters;
            return res;
        }
        VectorXd xb = rs.basic_values();
        double infeas = 0.0;
        for (int i = 0; i < m; ++i)
            if (rs.basis[i] >= art0) infeas += std::max(xb(i), 0.0);
        if (infeas > feas_tol) {
            res.status = LpStatus::infeasible;
            res.iterations = rs.iters;
            return res;
        }
        // pivot zero-level artificials out of the basis where possible
        for (int i = 0; i < m; ++i) {
            if (rs.basis[i] < art0) continue;
            MatrixXd B(m, m);
            for (int k = 0; k < m; ++k) B.col(k) = rs.M.col(rs.basis[k]);
            VectorXd ei = VectorXd::Unit(m, i);
            VectorXd row = Eigen::PartialPivLU<MatrixXd>(B.transpose()).solve(ei);
            int q = -1;
            double big = 1e-9;
            for (int j = 0; j < art0; ++j) {
                bool basic = false;
                for (int k = 0; k < m && !basic; ++k) basic = rs.basis[k] == j;
                if (basic) continue;
                double a = std::abs(row.dot(rs.M.col(j)));
                if (a > big) {
                    big = a;
                    q = j;
                }
            }
            if (q >= 0) rs.basis[i] = q;
        }
        for (int j = art0; j < n; ++j) rs.banned[j] = 1;
    }

    VectorXd c2 = VectorXd::Zero(n);
    c2.head(nx) = lp.c;
    res.status = rs.run(c2, tol, max_iter);
    res.iterations = rs.iters;
    VectorXd xb = rs.basic_values();
    for (int i = 0; i < m; ++i)
        if (rs.basis[i] < nx) res.x(rs.basis[i]) = std::max(0.0, xb(i));
    res.value = lp.c.dot(res.x);
    return res;
}

}  // namespace dasee
