#pragma once

#include "udn/network_model.hpp"
#include "udn/quadrature.hpp"

namespace udn {

// Additive tail term of the dense-network coverage bound. `paper` keeps the
// e^{-lambda pi d0}/(lambda pi d0) form as printed; `d0sq` substitutes d0^2,
// which matches the dimensions of the companion term. The oracle adjudicates
// which variant genuinely upper-bounds coverage.
enum class DenseBoundTail { paper, d0sq };

// Placement of the fading rate in the density-limit formulas. `paper` keeps
// the printed rate mu; `campbell` uses the mean fading power 1/mu that a
// mean-interference argument produces. Identical at mu = 1.
enum class MuConvention { paper, campbell };

// Upper bound on coverage at high density: interference restricted to the
// main-lobe-on-main-lobe interferers inside the breakpoint, noise and side
// lobes dropped. Valid as a bound for any sigma2 and side lobe gains;
// clamped to [0, 1].
double dense_coverage_upper_bound(const NetworkParams& params,
                                  DenseBoundTail tail = DenseBoundTail::paper,
                                  const QuadratureSpec& spec = {});

// Limit of lambda * SINR as density grows with a fixed beam pattern, for the
// flat near-field model (beta1 == 0):
//   N_B N_U alpha0 h / (E[G] * 2 pi * fading_mean_g * gamma_moment).
// Pass fading_mean_g = mu for the printed convention or 1/mu for the
// mean-interference reading; h_value is the serving fading draw or moment.
double sinr_density_limit(const NetworkParams& params, double fading_mean_g, double h_value);

// Target normalized mean interferer gain K/lambda of the density-tracking
// beam schedule. Throws InfeasibleError when K/lambda > 1 (the normalized
// mean gain cannot exceed the omni value 1).
double adapted_expected_gain(double k, double lambda);

// Beamwidth realizing the schedule when both ends share a width theta and a
// front-back ratio epsilon: theta = 2 pi (epsilon sqrt(K/lambda) - 1) /
// (epsilon - 1). Throws InfeasibleError when the formula leaves (0, 2 pi].
double symmetric_beamwidth(double k, double lambda, double epsilon);

struct AdaptationSchedule {
    double k = 1.0;
    double front_back_ratio = 100.0;  // epsilon for the symmetric rule
    double lambda_min = 1e-6;         // validity range, BS per m^2
    double lambda_max = 1.0;

    // Basic positivity plus feasibility of the symmetric beamwidth at both
    // range endpoints (propagates InfeasibleError).
    void validate() const;
};

struct AdaptedCoverageLimit {
    double value = 0.0;      // exp(log_value), may underflow to 0
    double log_value = 0.0;  // exact exponent, safe for huge magnitudes
};

// High-density coverage limit under the beam schedule (beta1 == 0):
// exp(-2 K pi mu^2 T gamma / alpha0) as printed, mu^2 dropped under the
// campbell convention.
AdaptedCoverageLimit adapted_coverage_limit(double k, const NetworkParams& params,
                                            MuConvention convention = MuConvention::paper);

struct AdaptedAseSlope {
    double value = 0.0;
    double exponent_log = 0.0;  // log of the exponential factor
    bool suspect = false;       // log argument <= 1: negative slope
};

// Printed high-density slope of the constrained ASE per unit density:
// ln(alpha0 h / (2 pi m gamma) - 1) * exp(coverage-limit exponent), with the
// fading placement m following the convention. The serving fading symbol in
// the printed formula is free; the caller supplies h_replacement.
// Throws DomainError when the log argument is nonpositive.
AdaptedAseSlope adapted_ase_slope(double k, const NetworkParams& params, double h_replacement,
                                  MuConvention convention = MuConvention::paper);

// Closed-form derivative of the interference-limited coverage with respect
// to the near-field intensity nu = lambda pi d0^2; strictly negative.
double coverage_derivative_near_field(double q, double threshold, double beta2, double nu,
                                      const QuadratureSpec& spec = {});

}  // namespace udn
