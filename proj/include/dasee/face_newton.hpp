#pragma once

#include <functional>

#include "dasee/model.hpp"

namespace dasee {

// Flat layout: tau (K) then s column-major (N*K).
VectorXd pack_flat(const Allocation& a);
Allocation unpack_flat(const VectorXd& z, int n, int k);

struct FlatObjective {
    std::function<double(const VectorXd&)> value;
    std::function<VectorXd(const VectorXd&)> grad;
};

struct FaceNewtonConfig {
    int max_iter = 30;
    double active_tol = 1e-9;   // relative to the row scale
    double fd_step = 1e-6;      // relative step for the finite-difference Hessian
};

// Active-set Newton ascent from a feasible x0 over
//   E_k(s) >= Ebar_k, sum tau <= 1, tau >= tau_lo, 0 <= s <= tau*Pbar,
// with tau frozen when fixed_time. Rows with a negative multiplier are released
// once the reduced gradient vanishes. Returns x0 unchanged if no step is accepted.
Allocation face_newton(const Allocation& x0, const Scenario& sc, const Channel& ch, const FlatObjective& obj,
                       const VectorXd& tau_lo, bool fixed_time, const FaceNewtonConfig& cfg = {});

}  // namespace dasee
