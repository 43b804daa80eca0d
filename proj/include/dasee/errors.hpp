#pragma once

#include <stdexcept>
#include <string>

namespace dasee {

struct InvalidConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dasee
