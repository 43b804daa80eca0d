#include "dasee/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "dasee/errors.hpp"
#include "dasee/lp.hpp"

namespace dasee {

void Scenario::validate() const {
    if (num_ports < 1 || num_users < 1) throw InvalidConfig("num_ports and num_users must be >= 1");
    if (!(side_length > 0.0)) throw InvalidConfig("side_length must be > 0");
    if (!(noise_power > 0.0)) throw InvalidConfig("noise_power must be > 0");
    if (!(conversion_eff > 0.0 && conversion_eff <= 1.0)) throw InvalidConfig("conversion_eff must be in (0,1]");
    if (!(pathloss_const > 0.0)) throw InvalidConfig("pathloss_const must be > 0");
    if (circuit_power.size() != num_users || weights.size() != num_users ||
        energy_req.size() != num_users || power_cap.size() != num_ports)
        throw InvalidConfig("per-user / per-port vector size mismatch");
    if ((circuit_power.array() < 0).any() || (weights.array() < 0).any() ||
        (energy_req.array() < 0).any() || (power_cap.array() < 0).any())
        throw InvalidConfig("caps, weights and requirements must be >= 0");
    if (static_cast<int>(port_positions.size()) != num_ports ||
        static_cast<int>(user_positions.size()) != num_users)
        throw InvalidConfig("position list size mismatch");
}

Allocation Allocation::zeros(int n, int k) {
    return {VectorXd::Zero(k), MatrixXd::Zero(n, k), MatrixXd::Zero(n, k)};
}

double distance(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

Scenario generate_scenario(const ScenarioParams& prm, std::uint64_t rng_seed) {
    if (prm.num_ports < 1 || prm.num_users < 1) throw InvalidConfig("num_ports and num_users must be >= 1");
    if (!(prm.side_length > 0.0)) throw InvalidConfig("side_length must be > 0");
    if (!prm.weights.empty() && static_cast<int>(prm.weights.size()) != prm.num_users)
        throw InvalidConfig("weights must have num_users entries");

    Scenario sc;
    sc.num_ports = prm.num_ports;
    sc.num_users = prm.num_users;
    sc.side_length = prm.side_length;
    sc.noise_power = prm.noise_power;
    sc.pathloss_const = prm.pathloss_const;
    sc.pathloss_exp = prm.pathloss_exp;
    sc.conversion_eff = prm.conversion_eff;
    sc.circuit_power = VectorXd::Constant(prm.num_users, prm.circuit_power);
    sc.weights = prm.weights.empty()
                     ? VectorXd::Ones(prm.num_users)
                     : VectorXd(Eigen::Map<const VectorXd>(prm.weights.data(), prm.num_users));
    sc.power_cap = VectorXd::Constant(prm.num_ports, prm.power_cap);
    sc.energy_req = VectorXd::Constant(prm.num_users, prm.energy_req);
    sc.min_distance = prm.min_distance;
    sc.fading = prm.fading;
    sc.seed = rng_seed;

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> U(0.0, prm.side_length);
    const double L = prm.side_length;
    if (prm.random_ports) {
        for (int i = 0; i < prm.num_ports; ++i) sc.port_positions.push_back({U(rng), U(rng)});
    } else {
        int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(prm.num_ports))));
        double cell = L / m;
        for (int i = 0; i < prm.num_ports; ++i)
            sc.port_positions.push_back({(i % m + 0.5) * cell, (i / m + 0.5) * cell});
    }
    for (int k = 0; k < prm.num_users; ++k) sc.user_positions.push_back({U(rng), U(rng)});
    sc.validate();
    return sc;
}

Channel generate_channel(const Scenario& sc, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    std::exponential_distribution<double> Exp(1.0);
    Channel ch;
    ch.h.resize(sc.num_ports, sc.num_users);
    for (int k = 0; k < sc.num_users; ++k) {
        for (int i = 0; i < sc.num_ports; ++i) {
            double d = std::max(sc.min_distance, distance(sc.port_positions[i], sc.user_positions[k]));
            double g = sc.fading ? Exp(rng) : 1.0;
            ch.h(i, k) = sc.pathloss_const * std::pow(d, -sc.pathloss_exp) * g;
        }
    }
    return ch;
}

double rate(double tau, const VectorXd& s_col, const VectorXd& h_col, double sigma2) {
    if (tau < 0.0 || (s_col.array() < 0).any()) throw std::domain_error("rate: negative input");
    if (tau == 0.0) return 0.0;
    return tau * std::log1p(h_col.dot(s_col) / (sigma2 * tau));
}

double rate_p(const VectorXd& p_col, const VectorXd& h_col, double sigma2) {
    return std::log1p(h_col.dot(p_col) / sigma2);
}

double harvested_energy(int k, const MatrixXd& s, const Channel& ch, double zeta) {
    if (k < 0 || k >= s.cols()) throw std::out_of_range("harvested_energy: user index");
    double e = 0.0;
    for (int j = 0; j < s.cols(); ++j)
        if (j != k) e += ch.h.col(k).dot(s.col(j));
    return zeta * e;
}

VectorXd harvested_energy(const MatrixXd& s, const Channel& ch, double zeta) {
    VectorXd total = s.rowwise().sum();
    VectorXd e(s.cols());
    for (int k = 0; k < s.cols(); ++k) e(k) = zeta * ch.h.col(k).dot(total - s.col(k));
    return e;
}

MatrixXd recover_power(const VectorXd& tau, const MatrixXd& s, bool* inconsistent) {
    MatrixXd p = MatrixXd::Zero(s.rows(), s.cols());
    bool bad = false;
    for (int k = 0; k < s.cols(); ++k) {
        if (tau(k) > 0.0)
            p.col(k) = s.col(k) / tau(k);
        else if ((s.col(k).array() > 0).any())
            bad = true;
    }
    if (inconsistent) *inconsistent = bad;
    return p;
}

Allocation make_allocation(const VectorXd& tau, const MatrixXd& s) {
    return {tau, s, recover_power(tau, s)};
}

VectorXd user_ee(const Allocation& a, const Channel& ch, const Scenario& sc) {
    const int K = sc.num_users;
    VectorXd ee = VectorXd::Zero(K);
    for (int k = 0; k < K; ++k) {
        if (a.tau(k) <= 0.0) continue;
        double r = rate_p(a.p.col(k), ch.h.col(k), sc.noise_power);
        double c = a.p.col(k).sum() + sc.circuit_power(k);
        if (c > 0.0) ee(k) = r / c;
    }
    return ee;
}

double network_ee(const Allocation& a, const Channel& ch, const Scenario& sc) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k < sc.num_users; ++k) {
        if (a.tau(k) <= 0.0) continue;
        num += sc.weights(k) * a.tau(k) * rate_p(a.p.col(k), ch.h.col(k), sc.noise_power);
        den += a.tau(k) * (a.p.col(k).sum() + sc.circuit_power(k));
    }
    return den > 0.0 ? num / den : 0.0;
}

double uc_ee(const Allocation& a, const Channel& ch, const Scenario& sc) {
    return sc.weights.dot(user_ee(a, ch, sc));
}

PerUserMetrics metrics(const Allocation& a, const Channel& ch, const Scenario& sc) {
    PerUserMetrics m;
    const int K = sc.num_users;
    m.rate = VectorXd::Zero(K);
    for (int k = 0; k < K; ++k) m.rate(k) = rate(a.tau(k), a.s.col(k), ch.h.col(k), sc.noise_power);
    m.harvested = harvested_energy(a.s, ch, sc.conversion_eff);
    m.user_ee = user_ee(a, ch, sc);
    m.network_ee = network_ee(a, ch, sc);
    return m;
}

double ConstraintResiduals::max() const { return std::max({energy, box, time}); }

ConstraintResiduals residuals(const Allocation& a, const Channel& ch, const Scenario& sc) {
    ConstraintResiduals r;
    VectorXd e = harvested_energy(a.s, ch, sc.conversion_eff);
    r.energy = std::max(0.0, (sc.energy_req - e).maxCoeff());
    for (int k = 0; k < sc.num_users; ++k) {
        for (int i = 0; i < sc.num_ports; ++i) {
            r.box = std::max(r.box, a.s(i, k) - a.tau(k) * sc.power_cap(i));
            r.box = std::max(r.box, -a.s(i, k));
        }
        r.time = std::max({r.time, -a.tau(k), a.tau(k) - 1.0});
    }
    r.time = std::max(r.time, a.tau.sum() - 1.0);
    return r;
}

Feasibility check_feasibility(const Scenario& sc, const Channel& ch) {
    return check_feasibility(sc, ch, VectorXd::Zero(sc.num_users), VectorXd());
}

Feasibility check_feasibility(const Scenario& sc, const Channel& ch, const VectorXd& tau_lo,
                              const VectorXd& fixed_tau) {
    const int N = sc.num_ports, K = sc.num_users;
    const bool fixed = fixed_tau.size() == K;
    const double zeta = sc.conversion_eff;

    // variables: [t (K, tau - tau_lo) unless fixed] [s (N*K, column-major by user)] [d+ d-]
    const int nt = fixed ? 0 : K;
    const int ns = N * K;
    const int nv = nt + ns + 2;
    auto sidx = [&](int i, int k) { return nt + k * N + i; };

    // energy rows scaled to unit magnitude
    double escale = 0.0;
    for (int k = 0; k < K; ++k) {
        double cap = zeta * ch.h.col(k).dot(sc.power_cap);
        escale = std::max({escale, cap, sc.energy_req(k)});
    }
    if (escale <= 0.0) escale = 1.0;

    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    std::vector<RowSense> sense;
    for (int k = 0; k < K; ++k) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(nv);
        for (int j = 0; j < K; ++j) {
            if (j == k) continue;
            for (int i = 0; i < N; ++i) r(sidx(i, j)) = zeta * ch.h(i, k) / escale;
        }
        r(nv - 2) = -1.0;
        r(nv - 1) = 1.0;
        rows.push_back(r);
        rhs.push_back(sc.energy_req(k) / escale);
        sense.push_back(RowSense::ge);
    }
    double pscale = std::max(1.0, sc.power_cap.maxCoeff());
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < N; ++i) {
            Eigen::VectorXd r = Eigen::VectorXd::Zero(nv);
            r(sidx(i, k)) = 1.0 / pscale;
            double b = 0.0;
            if (fixed) {
                b = fixed_tau(k) * sc.power_cap(i) / pscale;
            } else {
                r(k) = -sc.power_cap(i) / pscale;
                b = tau_lo(k) * sc.power_cap(i) / pscale;
            }
            rows.push_back(r);
            rhs.push_back(b);
            sense.push_back(RowSense::le);
        }
    }
    if (!fixed) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(nv);
        r.head(K).setOnes();
        rows.push_back(r);
        rhs.push_back(1.0 - tau_lo.sum());
        sense.push_back(RowSense::le);
        for (int k = 0; k < K; ++k) {
            Eigen::VectorXd u = Eigen::VectorXd::Zero(nv);
            u(k) = 1.0;
            rows.push_back(u);
            rhs.push_back(1.0 - tau_lo(k));
            sense.push_back(RowSense::le);
        }
    }
    // keep delta bounded: delta <= 1 (scaled units)
    {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(nv);
        r(nv - 2) = 1.0;
        r(nv - 1) = -1.0;
        rows.push_back(r);
        rhs.push_back(1.0);
        sense.push_back(RowSense::le);
    }

    LinearProgram lp;
    lp.A.resize(static_cast<int>(rows.size()), nv);
    for (int r = 0; r < lp.A.rows(); ++r) lp.A.row(r) = rows[r].transpose();
    lp.b = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<int>(rhs.size()));
    lp.sense = sense;
    lp.c = Eigen::VectorXd::Zero(nv);
    lp.c(nv - 2) = 1.0;
    lp.c(nv - 1) = -1.0;

    Feasibility f;
    if (!fixed && tau_lo.sum() > 1.0) return f;
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::optimal) throw NumericalFailure("check_feasibility: LP did not solve");

    VectorXd tau(K);
    MatrixXd s(N, K);
    for (int k = 0; k < K; ++k) {
        tau(k) = fixed ? fixed_tau(k) : tau_lo(k) + res.x(k);
        for (int i = 0; i < N; ++i) s(i, k) = std::min(res.x(sidx(i, k)), tau(k) * sc.power_cap(i));
    }
    f.slack = (res.x(nv - 2) - res.x(nv - 1)) * escale;
    f.alloc = make_allocation(tau, s);
    VectorXd e = harvested_energy(s, ch, zeta);
    f.slack = std::min(f.slack, (e - sc.energy_req).minCoeff());
    f.feasible = f.slack >= -1e-12 * escale;
    return f;
}

}  // namespace dasee
