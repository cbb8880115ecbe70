#pragma once

#include <stdexcept>
#include <string>

namespace ablab {

// Violated input contract (bad config, degenerate eigenvalue target, pole off
// mesh, ...). CLI maps this to exit code 2.
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Algorithm failed to deliver (non-convergence, refinement budget, singular
// factorization). CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ablab
