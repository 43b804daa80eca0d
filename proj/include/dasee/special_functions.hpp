#pragma once

namespace dasee {

// Principal branch W0 of x = w*exp(w), x >= -1/e. Throws std::domain_error
// below the branch point (inputs within 1e-15 of it are clamped).
double lambert_w0(double x);

}  // namespace dasee
