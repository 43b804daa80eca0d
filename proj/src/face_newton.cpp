#include "dasee/face_newton.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace dasee {

VectorXd pack_flat(const Allocation& a) {
    const int N = static_cast<int>(a.s.rows()), K = static_cast<int>(a.tau.size());
    VectorXd z(K + N * K);
    z.head(K) = a.tau;
    z.tail(N * K) = Eigen::Map<const VectorXd>(a.s.data(), N * K);
    return z;
}

Allocation unpack_flat(const VectorXd& z, int n, int k) {
    MatrixXd s = Eigen::Map<const MatrixXd>(z.data() + k, n, k);
    return make_allocation(z.head(k), s);
}

Allocation face_newton(const Allocation& x0, const Scenario& sc, const Channel& ch, const FlatObjective& obj,
                       const VectorXd& tau_lo, bool fixed_time, const FaceNewtonConfig& cfg) {
    const int N = sc.num_ports, K = sc.num_users, n = K + N * K;
    VectorXd z = pack_flat(x0);
    double F = obj.value(z);

    // Inequalities A z >= b.
    std::vector<VectorXd> rows;
    std::vector<double> rhs, scale;
    auto add = [&](VectorXd a, double b, double sc_) {
        rows.push_back(std::move(a));
        rhs.push_back(b);
        scale.push_back(sc_);
    };
    for (int k = 0; k < K; ++k) {
        VectorXd a = VectorXd::Zero(n);
        for (int j = 0; j < K; ++j) {
            if (j == k) continue;
            for (int i = 0; i < N; ++i) a(K + j * N + i) = sc.conversion_eff * ch.h(i, k);
        }
        add(a, sc.energy_req(k), std::max(sc.energy_req(k), 1e-300));
    }
    {
        VectorXd a = VectorXd::Zero(n);
        a.head(K).setConstant(-1.0);
        add(a, -1.0, 1.0);
    }
    for (int k = 0; k < K; ++k) {
        VectorXd a = VectorXd::Zero(n);
        a(k) = 1.0;
        add(a, tau_lo(k), 1.0);
        for (int i = 0; i < N; ++i) {
            VectorXd lo = VectorXd::Zero(n), hi = VectorXd::Zero(n);
            lo(K + k * N + i) = 1.0;
            add(lo, 0.0, std::max(sc.power_cap(i), 1e-300));
            hi(k) = sc.power_cap(i);
            hi(K + k * N + i) = -1.0;
            add(hi, 0.0, std::max(sc.power_cap(i), 1e-300));
        }
    }
    const int M = static_cast<int>(rows.size());
    auto on_row = [&](int r, const VectorXd& y) { return rows[r].dot(y) - rhs[r] <= cfg.active_tol * scale[r]; };
    std::vector<char> released(M, 0);

    for (int it = 0; it < cfg.max_iter; ++it) {
        std::vector<int> active;
        std::vector<char> is_active(M, 0);
        for (int r = 0; r < M; ++r) {
            if (released[r] && !on_row(r, z)) released[r] = 0;
            if (!released[r] && on_row(r, z)) {
                active.push_back(r);
                is_active[r] = 1;
            }
        }
        MatrixXd C(static_cast<int>(active.size()) + (fixed_time ? K : 0), n);
        for (std::size_t a = 0; a < active.size(); ++a) C.row(a) = rows[active[a]].transpose();
        if (fixed_time)
            for (int k = 0; k < K; ++k) {
                C.row(active.size() + k).setZero();
                C(active.size() + k, k) = 1.0;
            }
        MatrixXd Z;
        if (C.rows() == 0) {
            Z = MatrixXd::Identity(n, n);
        } else {
            Eigen::ColPivHouseholderQR<MatrixXd> qr(C.transpose());
            qr.setThreshold(1e-10);
            int r = static_cast<int>(qr.rank());
            if (r >= n) break;
            MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, n);
            Z = Q.rightCols(n - r);
        }
        VectorXd g = obj.grad(z);
        VectorXd gr = Z.transpose() * g;
        if (gr.norm() <= 1e-10 * std::max(1.0, g.norm())) {
            if (active.empty()) break;
            // g + C' nu = 0 with nu >= 0 at a KKT point; release the most negative one
            VectorXd nu = C.transpose().colPivHouseholderQr().solve(-g);
            int worst = -1;
            double most = -1e-9 * std::max(1.0, g.norm());
            for (std::size_t a = 0; a < active.size(); ++a)
                if (nu(a) * scale[active[a]] < most) {
                    most = nu(a) * scale[active[a]];
                    worst = static_cast<int>(a);
                }
            if (worst < 0) break;
            released[active[worst]] = 1;
            continue;
        }

        MatrixXd H(n, n);
        for (int j = 0; j < n; ++j) {
            double h = cfg.fd_step * std::max(std::abs(z(j)), 1e-6);
            VectorXd zp = z, zm = z;
            zp(j) += h;
            zm(j) -= h;
            H.col(j) = (obj.grad(zp) - obj.grad(zm)) / (2.0 * h);
        }
        MatrixXd Hr = Z.transpose() * H * Z;
        Hr = 0.5 * (Hr + Hr.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(-Hr);
        double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
        double shift = lmin > 1e-14 * std::max(lmax, 1e-300) ? 0.0 : -2.0 * lmin + 1e-12 * std::max(std::abs(lmax), 1e-12);
        VectorXd lam = es.eigenvalues().array() + shift;
        VectorXd v = es.eigenvectors() * (es.eigenvectors().transpose() * gr).cwiseQuotient(lam);
        VectorXd d = Z * v;

        double tmax = 1.0;
        for (int r = 0; r < M; ++r) {
            if (is_active[r] || released[r]) continue;
            double ad = rows[r].dot(d);
            if (ad < 0.0) tmax = std::min(tmax, std::max(0.0, rows[r].dot(z) - rhs[r]) / -ad);
        }
        if (tmax <= 0.0) break;
        double t = tmax, Fn = 0.0;
        VectorXd zn;
        bool ok = false;
        for (int b = 0; b < 40; ++b, t *= 0.5) {
            zn = z + t * d;
            for (int k = 0; k < K; ++k) {
                zn(k) = std::clamp(zn(k), tau_lo(k), 1.0);
                for (int i = 0; i < N; ++i)
                    zn(K + k * N + i) = std::clamp(zn(K + k * N + i), 0.0, zn(k) * sc.power_cap(i));
            }
            Fn = obj.value(zn);
            if (Fn > F) {
                ok = true;
                break;
            }
        }
        if (!ok) break;
        bool feasible = true;
        for (int k = 0; k < K && feasible; ++k)
            feasible = rows[k].dot(zn) >= rhs[k] - 1e-12 * scale[k];
        if (!feasible || zn.head(K).sum() > 1.0 + 1e-12) break;
        double gain = Fn - F;
        z = zn;
        F = Fn;
        if (gain <= 1e-15 * std::abs(F)) break;
    }
    return unpack_flat(z, N, K);
}

}  // namespace dasee
