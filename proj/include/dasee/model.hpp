#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dasee {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Point = std::array<double, 2>;

// Generation parameters. Scalars are broadcast to per-port / per-user vectors.
struct ScenarioParams {
    int num_ports = 7;
    int num_users = 4;
    double side_length = 10.0;       // m
    double noise_power = 3.981071705534973e-14;  // W, -104 dBm
    double pathloss_const = 1e-3;
    double pathloss_exp = 2.0;
    double conversion_eff = 0.6;
    double circuit_power = 0.5;      // W
    std::vector<double> weights;     // empty -> all ones
    double power_cap = 6.0;          // W per port
    double energy_req = 1e-4;        // J per user (0.1 mW over a unit frame)
    double min_distance = 0.5;       // m
    bool random_ports = false;
    bool fading = true;
};

struct Scenario {
    int num_ports = 0;
    int num_users = 0;
    double side_length = 0.0;
    std::vector<Point> port_positions;
    std::vector<Point> user_positions;
    double noise_power = 0.0;
    double pathloss_const = 0.0;
    double pathloss_exp = 0.0;
    double conversion_eff = 0.0;
    VectorXd circuit_power;
    VectorXd weights;
    VectorXd power_cap;
    VectorXd energy_req;
    double frame_length = 1.0;
    double min_distance = 0.5;
    bool fading = true;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Channel {
    MatrixXd h;  // N x K, h(i,k) from port i to user k
};

struct Allocation {
    VectorXd tau;  // K
    MatrixXd s;    // N x K energy
    MatrixXd p;    // N x K power

    static Allocation zeros(int n, int k);
};

struct PerUserMetrics {
    VectorXd rate;
    VectorXd harvested;
    VectorXd user_ee;
    double network_ee = 0.0;
};

Scenario generate_scenario(const ScenarioParams& params, std::uint64_t rng_seed);
Channel generate_channel(const Scenario& sc, std::uint64_t rng_seed);
double distance(const Point& a, const Point& b);

// tau*ln(1 + h.s/(sigma2*tau)), 0 at tau = 0
double rate(double tau, const VectorXd& s_col, const VectorXd& h_col, double sigma2);
// ln(1 + h.p/sigma2)
double rate_p(const VectorXd& p_col, const VectorXd& h_col, double sigma2);
double harvested_energy(int k, const MatrixXd& s, const Channel& ch, double zeta);
VectorXd harvested_energy(const MatrixXd& s, const Channel& ch, double zeta);

MatrixXd recover_power(const VectorXd& tau, const MatrixXd& s, bool* inconsistent = nullptr);
Allocation make_allocation(const VectorXd& tau, const MatrixXd& s);

VectorXd user_ee(const Allocation& a, const Channel& ch, const Scenario& sc);
double network_ee(const Allocation& a, const Channel& ch, const Scenario& sc);
double uc_ee(const Allocation& a, const Channel& ch, const Scenario& sc);
PerUserMetrics metrics(const Allocation& a, const Channel& ch, const Scenario& sc);

struct ConstraintResiduals {
    double energy = 0.0;  // max_k (Ebar_k - E_k)^+
    double box = 0.0;     // max (s - tau*Pbar)^+ and (-s)^+
    double time = 0.0;    // (sum tau - 1)^+ and tau outside [0,1]
    double max() const;
};
ConstraintResiduals residuals(const Allocation& a, const Channel& ch, const Scenario& sc);

struct Feasibility {
    bool feasible = false;
    double slack = 0.0;  // max-min energy slack delta*, J
    Allocation alloc;
};

// max delta s.t. E_k(s) - Ebar_k >= delta, 0 <= s <= tau*Pbar, sum tau <= 1,
// tau_lo <= tau <= 1. A nonempty fixed_tau freezes tau.
Feasibility check_feasibility(const Scenario& sc, const Channel& ch);
Feasibility check_feasibility(const Scenario& sc, const Channel& ch, const VectorXd& tau_lo,
                              const VectorXd& fixed_tau);

}  // namespace dasee
