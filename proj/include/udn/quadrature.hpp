#pragma once

#include <limits>
#include <span>
#include <type_traits>

#include "udn/errors.hpp"

namespace udn {

/// Tolerances and budget for adaptive quadrature. Semi-infinite ranges are
/// folded onto [0,1) by t = a + c*s/(1-s); tail_cutoff_probability p sets the
/// fold scale c = (1-p)/p, smaller p pushing quadrature nodes deeper into the
/// tail. The defaults serve every built-in integrand.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 200;
    double tail_cutoff_probability = 0.5;

    void validate() const {
        if (!(abs_tol > 0.0)) throw PreconditionError("QuadratureSpec: abs_tol must be > 0");
        if (!(rel_tol > 0.0)) throw PreconditionError("QuadratureSpec: rel_tol must be > 0");
        if (max_subdivisions < 1)
            throw PreconditionError("QuadratureSpec: max_subdivisions must be >= 1");
        if (!(tail_cutoff_probability > 0.0 && tail_cutoff_probability < 1.0))
            throw PreconditionError("QuadratureSpec: tail_cutoff_probability must be in (0,1)");
    }
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int subdivisions = 0;
};

namespace detail {

struct FuncRef {
    void* ctx;
    double (*fn)(void* ctx, double t);
};

QuadratureResult integrate_core(FuncRef f, double lower, double upper,
                                const QuadratureSpec& spec,
                                std::span<const double> split_points);

}  // namespace detail

/// Adaptive Gauss-Kronrod (7-15) integration of f over [lower, upper].
/// `upper` may be +infinity. Optional split points pin initial interval
/// boundaries (useful for kinks or known scale changes). Throws
/// NonConvergenceError (carrying the best estimate) if the subdivision budget
/// is exhausted, DomainError if the integrand evaluates non-finite.
template <class F>
QuadratureResult integrate(F&& f, double lower, double upper, const QuadratureSpec& spec = {},
                           std::span<const double> split_points = {}) {
    using Fn = std::remove_reference_t<F>;
    detail::FuncRef ref{const_cast<void*>(static_cast<const void*>(&f)),
                        [](void* ctx, double t) -> double { return (*static_cast<Fn*>(ctx))(t); }};
    return detail::integrate_core(ref, lower, upper, spec, split_points);
}

}  // namespace udn
