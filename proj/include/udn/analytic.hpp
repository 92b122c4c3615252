#pragma once

#include <functional>

#include "udn/network_model.hpp"
#include "udn/quadrature.hpp"

namespace udn {

// Law of the interferer fading coefficient. The serving link is always
// exponential with rate NetworkParams::mu; interferers usually share it but
// may carry any density on [0, inf).
class FadingSpec {
  public:
    static FadingSpec exponential(double rate);

    // density must integrate to 1 over [0, inf); verified here by quadrature
    // to within 10x the spec's rel_tol (plus the achieved integration error).
    static FadingSpec custom(std::function<double(double)> density,
                             const QuadratureSpec& spec = {});

    bool is_exponential() const { return rate_ > 0.0; }
    double rate() const;           // exponential kind only
    double density(double g) const;  // custom kind only

  private:
    FadingSpec() = default;
    double rate_ = 0.0;
    std::function<double(double)> density_;
};

struct CoverageResult {
    double value = 0.0;          // in [0, 1]
    double est_abs_error = 0.0;  // propagated quadrature error + any clamping
};

struct AseResult {
    double value = 0.0;  // bits/s/Hz/m^2
    double est_abs_error = 0.0;
};

// Conditional Laplace transform E[e^{-xI} | r0] of the aggregated
// interference seen from a serving distance r0 inside the breakpoint
// (interferers occupy (r0, inf), split across both path loss branches).
// Equals 1 at x = 0 and decreases to 0 as x grows.
double laplace_interference_near(double x, const NetworkParams& params, const FadingSpec& fading,
                                 double r0, const QuadratureSpec& spec = {});

// Same with the serving distance at or beyond the breakpoint, so every
// interferer is on the far branch.
double laplace_interference_far(double x, const NetworkParams& params, const FadingSpec& fading,
                                double r0, const QuadratureSpec& spec = {});

// P[SINR > threshold]: outer integral of the serving-distance density
// 2 pi lambda r0 e^{-lambda pi r0^2} against the noise factor and the
// interference Laplace transform, near and far serving branches summed.
CoverageResult coverage_probability(const NetworkParams& params, const FadingSpec& fading,
                                    const QuadratureSpec& spec = {});

// Interference-limited closed form. Requires sigma2 == 0, zero side lobes,
// beta1 == 0, interferer fading exponential with the serving rate; throws
// PreconditionError naming the first violated condition.
double coverage_simplified(const NetworkParams& params, const QuadratureSpec& spec = {});

// Constrained area spectral efficiency
//   lambda * E[log2(1+SINR) * 1{SINR >= threshold}]
// evaluated as an outer integral over the rate variable of coverage at the
// corresponding threshold, plus the mass term at the threshold itself.
AseResult ase_detail(const NetworkParams& params, const FadingSpec& fading,
                     const QuadratureSpec& spec = {});
double ase(const NetworkParams& params, const FadingSpec& fading,
           const QuadratureSpec& spec = {});

// Closed-form-integrand counterpart of ase_detail under the
// coverage_simplified preconditions.
AseResult ase_simplified_detail(const NetworkParams& params, const QuadratureSpec& spec = {});
double ase_simplified(const NetworkParams& params, const QuadratureSpec& spec = {});

}  // namespace udn
