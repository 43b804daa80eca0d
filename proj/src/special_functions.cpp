#include "dasee/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dasee {

namespace {
constexpr double kInvE = 0.36787944117144233;
}

double lambert_w0(double x) {
    if (std::isnan(x)) throw std::domain_error("lambert_w0: NaN argument");
    if (x < -kInvE) {
        if (x < -kInvE - 1e-15) throw std::domain_error("lambert_w0: argument below -1/e");
        x = -kInvE;
    }
    if (x == 0.0) return 0.0;
    if (x == -kInvE) return -1.0;
    if (std::isinf(x)) return x;

    double w;
    if (x < -0.32) {
        // series about the branch point in p = sqrt(2(ex+1))
        double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < 3.0) {
        w = std::log1p(x);
        w = w * (1.0 - std::log1p(w) / (2.0 + w));
    } else {
        double l1 = std::log(x), l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    for (int it = 0; it < 64; ++it) {
        double ew = std::exp(w);
        double f = w * ew - x;
        double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        double dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 1e-14 * (1.0 + std::abs(w))) break;
    }
    return w < -1.0 ? -1.0 : w;
}

}  // namespace dasee
