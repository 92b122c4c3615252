#include "udn/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "udn/errors.hpp"
#include "udn/special_functions.hpp"

namespace udn {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* message) {
    if (!ok) throw PreconditionError(message);
}

// int_1^v T / (T + t^{beta1/2}) dt for v >= 1. Closed forms at the flat,
// inverse-square and inverse-quartic slopes; otherwise quadrature in log t so
// huge v stays cheap.
double mainlobe_overlap(double v, double threshold, double beta1, const QuadratureSpec& spec) {
    if (v <= 1.0) return 0.0;
    if (beta1 == 0.0) return (v - 1.0) * threshold / (1.0 + threshold);
    if (beta1 == 2.0) return threshold * std::log((threshold + v) / (threshold + 1.0));
    if (beta1 == 4.0) {
        const double st = std::sqrt(threshold);
        return st * (std::atan(v / st) - std::atan(1.0 / st));
    }
    const double half = 0.5 * beta1;
    auto f = [threshold, half](double w) {
        const double b = half * w;
        if (b > 700.0) return threshold * std::exp(w - b);
        return threshold * std::exp(w) / (threshold + std::exp(b));
    };
    return integrate(f, 0.0, std::log(v), spec).value;
}

QuadratureSpec tighten(const QuadratureSpec& outer) {
    QuadratureSpec inner = outer;
    inner.abs_tol = std::max(outer.abs_tol * 1e-3, 1e-14);
    inner.rel_tol = std::max(outer.rel_tol * 1e-2, 1e-12);
    return inner;
}

}  // namespace

double dense_coverage_upper_bound(const NetworkParams& params, DenseBoundTail tail,
                                  const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    const double q = params.beams.alignment_probability();
    const double threshold = params.threshold;
    const double beta1 = params.model.beta1;
    const double d0sq = params.model.d0 * params.model.d0;
    const double lam_pi = params.lambda * kPi;
    const QuadratureSpec inner = tighten(spec);

    auto integrand = [&](double u) {
        const double w = mainlobe_overlap(d0sq / u, threshold, beta1, inner);
        return lam_pi * std::exp(-lam_pi * q * u * (1.0 + w));
    };
    const double scale = 1.0 / (lam_pi * q);
    std::vector<double> splits;
    for (double m : {0.7, 4.0, 16.0}) {
        const double p = m * scale;
        if (p < 0.999 * d0sq) splits.push_back(p);
    }
    const double body = integrate(integrand, 0.0, d0sq, spec, splits).value;

    double a = lam_pi * params.model.d0;
    if (tail == DenseBoundTail::d0sq) a = lam_pi * d0sq;
    const double total = body + std::exp(-a) / a;
    if (total > 1.0) return 1.0;
    if (total < 0.0) return 0.0;
    return total;
}

double sinr_density_limit(const NetworkParams& params, double fading_mean_g, double h_value) {
    params.validate();
    require(params.model.beta1 == 0.0, "sinr_density_limit: requires beta1 == 0");
    require(std::isfinite(fading_mean_g) && fading_mean_g > 0.0,
            "sinr_density_limit: fading_mean_g must be > 0");
    require(std::isfinite(h_value) && h_value >= 0.0, "sinr_density_limit: h_value must be >= 0");
    const double gamma = gamma_moment(params.model);
    const double nn = params.beams.main_bs * params.beams.main_ue;
    const double eg = expected_gain(gain_distribution(params.beams));
    return nn * params.model.alpha0 * h_value / (eg * 2.0 * kPi * fading_mean_g * gamma);
}

double adapted_expected_gain(double k, double lambda) {
    require(std::isfinite(k) && k > 0.0, "adapted_expected_gain: k must be > 0");
    require(std::isfinite(lambda) && lambda > 0.0, "adapted_expected_gain: lambda must be > 0");
    const double target = k / lambda;
    if (target > 1.0) {
        throw InfeasibleError(
            "adapted_expected_gain: k/lambda > 1, normalized mean gain cannot exceed omni");
    }
    return target;
}

double symmetric_beamwidth(double k, double lambda, double epsilon) {
    require(std::isfinite(epsilon) && epsilon > 1.0, "symmetric_beamwidth: epsilon must be > 1");
    const double target = adapted_expected_gain(k, lambda);
    const double theta = 2.0 * kPi * (epsilon * std::sqrt(target) - 1.0) / (epsilon - 1.0);
    if (!(theta > 0.0)) {
        throw InfeasibleError(
            "symmetric_beamwidth: density too high for this front-back ratio, width <= 0");
    }
    if (theta > 2.0 * kPi * (1.0 + 1e-12)) {
        throw InfeasibleError("symmetric_beamwidth: width exceeds full circle");
    }
    return theta;
}

void AdaptationSchedule::validate() const {
    require(std::isfinite(k) && k > 0.0, "AdaptationSchedule: k must be > 0");
    require(std::isfinite(front_back_ratio) && front_back_ratio > 1.0,
            "AdaptationSchedule: front_back_ratio must be > 1");
    require(std::isfinite(lambda_min) && lambda_min > 0.0,
            "AdaptationSchedule: lambda_min must be > 0");
    require(std::isfinite(lambda_max) && lambda_max >= lambda_min,
            "AdaptationSchedule: lambda_max must be >= lambda_min");
    symmetric_beamwidth(k, lambda_min, front_back_ratio);
    symmetric_beamwidth(k, lambda_max, front_back_ratio);
}

AdaptedCoverageLimit adapted_coverage_limit(double k, const NetworkParams& params,
                                            MuConvention convention) {
    params.validate();
    require(std::isfinite(k) && k > 0.0, "adapted_coverage_limit: k must be > 0");
    require(params.model.beta1 == 0.0, "adapted_coverage_limit: requires beta1 == 0");
    const double gamma = gamma_moment(params.model);
    const double mu_sq =
        convention == MuConvention::paper ? params.mu * params.mu : 1.0;
    const double log_value =
        -2.0 * k * kPi * mu_sq * params.threshold * gamma / params.model.alpha0;
    return {std::exp(log_value), log_value};
}

AdaptedAseSlope adapted_ase_slope(double k, const NetworkParams& params, double h_replacement,
                                  MuConvention convention) {
    params.validate();
    require(std::isfinite(k) && k > 0.0, "adapted_ase_slope: k must be > 0");
    require(params.model.beta1 == 0.0, "adapted_ase_slope: requires beta1 == 0");
    require(std::isfinite(h_replacement) && h_replacement > 0.0,
            "adapted_ase_slope: h_replacement must be > 0");
    const double gamma = gamma_moment(params.model);
    const double m_eff = convention == MuConvention::paper ? params.mu : 1.0 / params.mu;
    const double arg =
        params.model.alpha0 * h_replacement / (2.0 * kPi * m_eff * gamma) - 1.0;
    if (!(arg > 0.0)) {
        throw DomainError("adapted_ase_slope: log argument <= 0");
    }
    const double exponent =
        adapted_coverage_limit(k, params, convention).log_value;
    AdaptedAseSlope out;
    out.exponent_log = exponent;
    out.value = std::log(arg) * std::exp(exponent);
    out.suspect = arg <= 1.0;
    return out;
}

double coverage_derivative_near_field(double q, double threshold, double beta2, double nu,
                                      const QuadratureSpec& spec) {
    require(std::isfinite(q) && q > 0.0 && q <= 1.0,
            "coverage_derivative_near_field: q must be in (0, 1]");
    require(std::isfinite(threshold) && threshold > 0.0,
            "coverage_derivative_near_field: threshold must be > 0");
    require(std::isfinite(beta2) && beta2 > 2.0,
            "coverage_derivative_near_field: beta2 must be > 2");
    require(std::isfinite(nu) && nu > 0.0, "coverage_derivative_near_field: nu must be > 0");
    const double s = threshold / (1.0 + threshold);
    const double r = rho(threshold, beta2, spec);
    const double pref = q * (s + r) / (1.0 - q * s);
    return pref * (std::exp(-nu * (q * r + 1.0)) - std::exp(-nu * (q * r + q * s)));
}

}  // namespace udn
