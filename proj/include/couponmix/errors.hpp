#pragma once

#include <stdexcept>

namespace couponmix {

// Invalid configuration, mixture, or argument. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical route refused to produce a result it cannot stand behind
// (cancellation past the reliability limit, quadrature non-convergence).
// CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A resource limit was exceeded (lattice memory, subset enumeration size).
// CLI maps this to exit code 3 as well: the method is refusing, not failing.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace couponmix
