#pragma once

#include <stdexcept>

namespace aoitail {

// A rate/age-limit combination that admits no stable transform bound.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical fallback would exceed its configured work budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configuration file or override could not be parsed or validated.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace aoitail
