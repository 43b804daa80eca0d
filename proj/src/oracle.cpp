#include "dasee/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dasee/errors.hpp"

namespace dasee {

GridSpec GridSpec::refined(int factor) const {
    GridSpec g = *this;
    g.power_points = (power_points - 2) * factor + 2;
    g.time_points = (time_points - 1) * factor + 1;
    return g;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> port_levels(double cap, const GridSpec& g) {
    std::vector<double> v{0.0};
    const int n = g.power_points - 1;
    for (int j = 0; j < n; ++j) {
        double e = n == 1 ? 0.0 : static_cast<double>(n - 1 - j) / (n - 1);
        v.push_back(cap * std::pow(g.power_floor, e));
    }
    return v;
}

std::vector<double> time_levels(const GridSpec& g) {
    std::vector<double> t(g.time_points);
    for (int a = 0; a < g.time_points; ++a) t[a] = static_cast<double>(a) / (g.time_points - 1);
    return t;
}

// All power vectors of one user on the grid.
std::vector<VectorXd> power_vectors(const Scenario& sc, const GridSpec& g) {
    const int N = sc.num_ports;
    std::vector<std::vector<double>> lv;
    for (int i = 0; i < N; ++i) lv.push_back(port_levels(sc.power_cap(i), g));
    std::vector<VectorXd> out;
    std::vector<int> idx(N, 0);
    for (;;) {
        VectorXd p(N);
        for (int i = 0; i < N; ++i) p(i) = lv[i][idx[i]];
        out.push_back(p);
        int i = 0;
        while (i < N && ++idx[i] == static_cast<int>(lv[i].size())) idx[i++] = 0;
        if (i == N) break;
    }
    return out;
}

struct Entry {
    double deliver;  // energy handed to the other user per unit time
    double rate;
    double cost;
    int id;
};

// Max of score over entries with deliver >= thr, entries sorted by deliver descending.
struct PrefixMax {
    std::vector<double> best;
    std::vector<int> arg;
    void build(const std::vector<Entry>& e, const std::vector<double>& score) {
        best.resize(e.size());
        arg.resize(e.size());
        double b = kNegInf;
        int a = -1;
        for (std::size_t t = 0; t < e.size(); ++t) {
            if (score[t] > b) {
                b = score[t];
                a = static_cast<int>(t);
            }
            best[t] = b;
            arg[t] = a;
        }
    }
    // returns index into e or -1
    int query(const std::vector<Entry>& e, double thr) const {
        auto it = std::partition_point(e.begin(), e.end(), [&](const Entry& x) { return x.deliver >= thr; });
        std::size_t n = static_cast<std::size_t>(it - e.begin());
        if (n == 0) return -1;
        return arg[n - 1];
    }
};

struct UserTable {
    std::vector<Entry> e;
    std::vector<VectorXd> p;
};

UserTable build_table(const Scenario& sc, const Channel& ch, int k, const GridSpec& g) {
    UserTable t;
    t.p = power_vectors(sc, g);
    const int o = 1 - k;
    for (std::size_t n = 0; n < t.p.size(); ++n) {
        const VectorXd& p = t.p[n];
        t.e.push_back({sc.conversion_eff * ch.h.col(o).dot(p), rate_p(p, ch.h.col(k), sc.noise_power),
                       p.sum() + sc.circuit_power(k), static_cast<int>(n)});
    }
    std::sort(t.e.begin(), t.e.end(), [](const Entry& a, const Entry& b) {
        return a.deliver > b.deliver || (a.deliver == b.deliver && a.id < b.id);
    });
    return t;
}

void check_size(const Scenario& sc, const GridSpec& g) {
    if (sc.num_users != 2) throw InvalidConfig("grid oracle supports exactly two users");
    if (g.power_points < 2 || g.time_points < 2) throw InvalidConfig("grid needs >= 2 points per axis");
    double combos = std::pow(static_cast<double>(g.power_points), sc.num_ports);
    if (combos * 2.0 + static_cast<double>(g.time_points) * g.time_points > g.max_evaluations)
        throw InvalidConfig("grid too large");
}

Allocation alloc_from(const Scenario& sc, const VectorXd& tau, const VectorXd& p0, const VectorXd& p1) {
    MatrixXd s(sc.num_ports, 2);
    s.col(0) = tau(0) * p0;
    s.col(1) = tau(1) * p1;
    return make_allocation(tau, s);
}

}  // namespace

GridResult grid_search_uc(const Scenario& sc, const Channel& ch, const GridSpec& g, const VectorXd& fixed_tau) {
    check_size(sc, g);
    UserTable tab[2] = {build_table(sc, ch, 0, g), build_table(sc, ch, 1, g)};
    PrefixMax pm[2];
    for (int k = 0; k < 2; ++k) {
        std::vector<double> eta;
        for (auto& x : tab[k].e) eta.push_back(x.rate / x.cost);
        pm[k].build(tab[k].e, eta);
    }
    std::vector<std::pair<double, double>> pairs;
    if (fixed_tau.size() == 2) {
        pairs.push_back({fixed_tau(0), fixed_tau(1)});
    } else {
        for (double t : time_levels(g)) pairs.push_back({t, 1.0 - t});
    }

    GridResult res;
    res.value = kNegInf;
    for (auto [t0, t1] : pairs) {
        double t[2] = {t0, t1};
        double val = 0.0;
        int pick[2] = {-1, -1};
        bool ok = true;
        for (int k = 0; k < 2 && ok; ++k) {
            const double req = sc.energy_req(1 - k);
            if (t[k] <= 0.0) {
                ok = req <= 0.0;
                continue;
            }
            int j = pm[k].query(tab[k].e, req / (t[k] * (1.0 + 1e-12)));
            if (j < 0) {
                ok = false;
                break;
            }
            pick[k] = j;
            val += sc.weights(k) * tab[k].e[j].rate / tab[k].e[j].cost;
        }
        res.evaluations += static_cast<double>(tab[0].e.size() + tab[1].e.size());
        if (!ok || !(val > res.value)) continue;
        res.value = val;
        res.feasible = true;
        VectorXd tau(2);
        tau << t[0], t[1];
        VectorXd p0 = pick[0] >= 0 ? tab[0].p[tab[0].e[pick[0]].id] : VectorXd::Zero(sc.num_ports);
        VectorXd p1 = pick[1] >= 0 ? tab[1].p[tab[1].e[pick[1]].id] : VectorXd::Zero(sc.num_ports);
        res.alloc = alloc_from(sc, tau, p0, p1);
    }
    if (!res.feasible) res.value = 0.0;
    return res;
}

GridResult grid_search_nc(const Scenario& sc, const Channel& ch, const GridSpec& g, const VectorXd& fixed_tau) {
    check_size(sc, g);
    UserTable tab[2] = {build_table(sc, ch, 0, g), build_table(sc, ch, 1, g)};
    std::vector<double> tl = time_levels(g);
    const bool fixed = fixed_tau.size() == 2;
    std::vector<double> tv[2];
    for (int k = 0; k < 2; ++k) tv[k] = fixed ? std::vector<double>{fixed_tau(k)} : tl;

    GridResult res;

    // Best grid point for the subtractive objective N - q D; returns value, fills choice.
    struct Choice {
        double t[2];
        int pick[2];
    };
    auto sweep = [&](double q, Choice& best_choice) {
        PrefixMax pm[2];
        for (int k = 0; k < 2; ++k) {
            std::vector<double> sc_v;
            for (auto& x : tab[k].e) sc_v.push_back(sc.weights(k) * x.rate - q * x.cost);
            pm[k].build(tab[k].e, sc_v);
        }
        // per-user best contribution for each time level
        std::vector<double> m[2];
        std::vector<int> arg[2];
        for (int k = 0; k < 2; ++k) {
            const double req = sc.energy_req(1 - k);
            for (double t : tv[k]) {
                if (t <= 0.0) {
                    m[k].push_back(req <= 0.0 ? 0.0 : kNegInf);
                    arg[k].push_back(-1);
                    continue;
                }
                int j = pm[k].query(tab[k].e, req / (t * (1.0 + 1e-12)));
                arg[k].push_back(j);
                m[k].push_back(j < 0 ? kNegInf
                                     : t * (sc.weights(k) * tab[k].e[j].rate - q * tab[k].e[j].cost));
            }
            res.evaluations += static_cast<double>(tab[k].e.size() + tv[k].size());
        }
        double best = kNegInf;
        for (std::size_t a = 0; a < tv[0].size(); ++a) {
            for (std::size_t b = 0; b < tv[1].size(); ++b) {
                if (tv[0][a] + tv[1][b] > 1.0 + 1e-12) break;
                if (tv[0][a] <= 0.0 && tv[1][b] <= 0.0) continue;
                double v = m[0][a] + m[1][b];
                if (v > best) {
                    best = v;
                    best_choice = {{tv[0][a], tv[1][b]}, {arg[0][a], arg[1][b]}};
                }
            }
        }
        return best;
    };

    double qhi = 0.0;
    for (int k = 0; k < 2; ++k)
        for (auto& x : tab[k].e) qhi = std::max(qhi, sc.weights(k) * x.rate / x.cost);
    qhi = qhi * 1.01 + 1e-12;
    double qlo = 0.0;
    Choice ch_lo{};
    if (!(sweep(0.0, ch_lo) > kNegInf)) return res;
    for (int it = 0; it < 200 && qhi - qlo > 1e-13 * std::max(1.0, qhi); ++it) {
        double mid = 0.5 * (qlo + qhi);
        Choice c{};
        if (sweep(mid, c) >= 0.0) {
            qlo = mid;
            ch_lo = c;
        } else {
            qhi = mid;
        }
    }
    VectorXd tau(2);
    tau << ch_lo.t[0], ch_lo.t[1];
    VectorXd p[2];
    for (int k = 0; k < 2; ++k)
        p[k] = ch_lo.pick[k] >= 0 ? tab[k].p[tab[k].e[ch_lo.pick[k]].id] : VectorXd::Zero(sc.num_ports);
    res.alloc = alloc_from(sc, tau, p[0], p[1]);
    res.value = network_ee(res.alloc, ch, sc);
    res.feasible = true;
    return res;
}

FiniteDiffReport finite_diff(const SubtractiveProblem& pr, const DualState& d, const Scenario& sc,
                             const Channel& ch, const VectorXd& tau, const MatrixXd& s, double rel_step) {
    FiniteDiffReport rep;
    LinearOffsets off = make_offsets(pr, d, sc, ch);
    const double sig = sc.noise_power;
    auto L = [&](const VectorXd& t, const MatrixXd& x) { return lagrangian(pr, d, t, x, sc, ch); };
    auto rel = [](double fd, double an) { return std::abs(fd - an) / std::max(std::abs(an), 1.0); };
    for (int k = 0; k < sc.num_users; ++k) {
        double h = rel_step * std::max(tau(k), 1e-3);
        VectorXd tp = tau, tm = tau;
        tp(k) += h;
        tm(k) -= h;
        double fd = (L(tp, s) - L(tm, s)) / (2.0 * h);
        rep.max_rel_err_tau = std::max(rep.max_rel_err_tau, rel(fd, dL_dtau(k, tau, s, off, ch, sig)));
        double fd2 = (dL_dtau(k, tp, s, off, ch, sig) - dL_dtau(k, tm, s, off, ch, sig)) / (2.0 * h);
        double an2 = d2L_dtau2(k, tau, s, off, ch, sig);
        rep.max_rel_err_tau2 = std::max(rep.max_rel_err_tau2, rel(fd2, an2));
        rep.max_d2_tau = std::max(rep.max_d2_tau, an2);
        ++rep.checks;
        for (int i = 0; i < sc.num_ports; ++i) {
            double hs = rel_step * std::max(s(i, k), 1e-6 * sc.power_cap(i));
            MatrixXd sp = s, sm = s;
            sp(i, k) += hs;
            sm(i, k) -= hs;
            double fds = (L(tau, sp) - L(tau, sm)) / (2.0 * hs);
            rep.max_rel_err_s = std::max(rep.max_rel_err_s, rel(fds, dL_ds(i, k, tau, s, off, ch, sig)));
            ++rep.checks;
        }
    }
    return rep;
}

}  // namespace dasee
