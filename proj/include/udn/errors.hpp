#pragma once

#include <stdexcept>
#include <string>

namespace udn {

/// Argument outside the mathematical domain of the operation.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A constructor or operation precondition was violated; the message names it.
struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// An integral in the requested configuration does not converge.
struct DivergenceError : std::domain_error {
    explicit DivergenceError(const std::string& what) : std::domain_error(what) {}
};

/// Requested setup cannot be realized (e.g. beam adaptation outside its
/// feasible density range).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive quadrature hit its subdivision cap before the tolerance was met.
/// Carries the best estimate obtained and the achieved error bound.
struct NonConvergenceError : std::runtime_error {
    NonConvergenceError(const std::string& what, double best, double error)
        : std::runtime_error(what), best_estimate(best), error_bound(error) {}
    double best_estimate;
    double error_bound;
};

}  // namespace udn
