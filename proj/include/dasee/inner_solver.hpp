#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "dasee/model.hpp"

namespace dasee {

// Concave subtractive objective
//   phi(tau, s) = sum_k log_weight_k * R_k(tau_k, s_k) + <s_coef, s> + <tau_coef, tau>
// over 0 <= s <= tau*Pbar, tau_lo <= tau <= 1, sum tau <= 1, E_k(s) >= Ebar_k.
// UC: log_weight = alpha*w, s_coef = -alpha*beta, tau_coef = -alpha*beta*pc.
// NC: log_weight = w, s_coef = -q, tau_coef = -q*pc.
struct SubtractiveProblem {
    VectorXd log_weight;
    MatrixXd s_coef;
    VectorXd tau_coef;
    VectorXd tau_lo;
    VectorXd fixed_tau;  // nonempty: tau frozen, time constraint dropped

    bool fixed() const { return fixed_tau.size() > 0; }
};

SubtractiveProblem make_uc_problem(const Scenario& sc, const VectorXd& alpha, const VectorXd& beta,
                                   const VectorXd& tau_lo, const VectorXd& fixed_tau = {});
SubtractiveProblem make_nc_problem(const Scenario& sc, double q, const VectorXd& tau_lo,
                                   const VectorXd& fixed_tau = {});
SubtractiveProblem scaled(SubtractiveProblem pr, double factor);

double subtractive_value(const SubtractiveProblem& pr, const VectorXd& tau, const MatrixXd& s,
                         const Scenario& sc, const Channel& ch);

struct DualState {
    VectorXd mu;        // K
    MatrixXd upsilon;   // N x K
    double lambda = 0.0;

    static DualState zeros(int n, int k);
    // packing: mu block, upsilon row-major by (i,k), lambda last
    VectorXd pack() const;
    static DualState unpack(const VectorXd& z, int n, int k);
};

struct LinearOffsets {
    VectorXd log_weight;  // per user
    VectorXd A;           // tau coefficient (A_k for UC, C_k for NC)
    MatrixXd B;           // s coefficient (B_ik for UC, D_ik for NC)
};

LinearOffsets make_offsets(const SubtractiveProblem& pr, const DualState& d, const Scenario& sc,
                           const Channel& ch);

double lagrangian(const SubtractiveProblem& pr, const DualState& d, const VectorXd& tau, const MatrixXd& s,
                  const Scenario& sc, const Channel& ch);
double dL_dtau(int k, const VectorXd& tau, const MatrixXd& s, const LinearOffsets& off, const Channel& ch,
               double sigma2);
double d2L_dtau2(int k, const VectorXd& tau, const MatrixXd& s, const LinearOffsets& off, const Channel& ch,
                 double sigma2);
double dL_ds(int i, int k, const VectorXd& tau, const MatrixXd& s, const LinearOffsets& off, const Channel& ch,
             double sigma2);

// Coordinate maximizer of L over tau_k in [lo, hi] with s fixed.
double tau_update(int k, const VectorXd& s_col, const VectorXd& h_col, const LinearOffsets& off, double sigma2,
                  double lo = 0.0, double hi = 1.0);
// Coordinate maximizer of L over s_ik in [0, tau_k * cap] with the rest fixed.
double s_update(int i, int k, const MatrixXd& s, double tau_k, const VectorXd& h_col, const LinearOffsets& off,
                double sigma2, double cap);

// max a*ln(1 + g.p) + B.p over 0 <= p <= cap (g = h/sigma2)
VectorXd box_maximize(double a, const VectorXd& g, const VectorXd& B, const VectorXd& cap);

struct BcdConfig {
    double tol_abs = 1e-9;
    double tol_rel = 1e-7;
    int max_passes = 500;
};

struct BcdResult {
    VectorXd tau;
    MatrixXd s;
    double value = 0.0;
    int passes = 0;
    bool converged = false;
    std::vector<double> trace;  // L after each pass
};

BcdResult bcd_maximize(const SubtractiveProblem& pr, const DualState& d, const Scenario& sc, const Channel& ch,
                       const VectorXd& tau0, const MatrixXd& s0, const BcdConfig& cfg = {});

// d g / d(mu, upsilon, lambda) at an inner maximizer, full packing order
VectorXd dual_subgradient(const Allocation& a, const Scenario& sc, const Channel& ch);

struct EllipsoidConfig {
    double tol = 1e-9;         // relative: sqrt(g'Ag) <= tol * max(1, |f_best|)
    int max_iter = 0;          // 0 -> 2000 * dim
    int max_restarts = 3;
    double restart_factor = 100.0;
    bool nonnegative = true;
    bool record_logdet = false;
};

struct EllipsoidResult {
    VectorXd z;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    int restarts = 0;
    bool converged = false;
    std::vector<double> logdet;
};

// f(z, grad) returns value and writes a subgradient.
using DualObjective = std::function<double(const VectorXd&, VectorXd&)>;

EllipsoidResult ellipsoid_minimize(const DualObjective& f, const VectorXd& z0, double radius,
                                   const EllipsoidConfig& cfg = {});

enum class DualMode { reduced, full };

struct DualConfig {
    DualMode mode = DualMode::reduced;
    EllipsoidConfig ellipsoid;
    BcdConfig bcd;
    double radius = 0.0;  // 0 -> derived from problem scale
    int history = 0;      // 0 -> max(100, 20*dim)
    int polish_iters = 30;  // active-set Newton steps on the recovered point, 0 disables
    std::ostream* trace = nullptr;
};

struct DualSolution {
    Allocation alloc;
    DualState duals;
    double dual_value = 0.0;    // best g found (upper bound)
    double primal_value = 0.0;  // phi at the recovered allocation
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    bool recovered = false;
    bool feasible = false;      // recovered allocation meets the energy and time rows
};

// A feasible anchor joins the recovery pool, so the returned allocation is feasible
// and at least as good as the anchor.
DualSolution solve_dual(const SubtractiveProblem& pr, const Scenario& sc, const Channel& ch,
                        const DualConfig& cfg = {}, const Allocation* anchor = nullptr);

}  // namespace dasee
