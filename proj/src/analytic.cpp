#include "udn/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "udn/special_functions.hpp"

namespace udn {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Inner integrals run tighter than the caller's spec so their error stays
// subdominant in the propagated bound.
QuadratureSpec tighten(const QuadratureSpec& outer) {
    QuadratureSpec s = outer;
    s.abs_tol = std::max(outer.abs_tol * 1e-3, 1e-14);
    s.rel_tol = std::max(outer.rel_tol * 1e-2, 1e-12);
    return s;
}

struct LaplaceContext {
    double lambda = 0.0;
    double alpha0 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double d0 = 0.0;
    double d0sq = 0.0;
    GainDistribution dist;
    const FadingSpec* fading = nullptr;
    QuadratureSpec inner;
};

LaplaceContext make_context(const NetworkParams& params, const FadingSpec& fading,
                            const QuadratureSpec& spec) {
    LaplaceContext c;
    c.lambda = params.lambda;
    c.alpha0 = params.model.alpha0;
    c.beta1 = params.model.beta1;
    c.beta2 = params.model.beta2;
    c.d0 = params.model.d0;
    c.d0sq = params.model.d0 * params.model.d0;
    c.dist = gain_distribution(params.beams);
    c.fading = &fading;
    c.inner = tighten(spec);
    return c;
}

// (1/2) * int_{u0}^{u1} z / (w^{beta1/2} + z) dw: the annulus integral of
// v * E_g[1 - e^{-z mu v^{-beta1} g}] for exponential fading, written in
// w = v^2. Closed forms where the exponent allows, quadrature otherwise.
double annulus_integral_exp(double z, double beta1, double u0, double u1,
                            const QuadratureSpec& spec) {
    if (z <= 0.0 || u1 <= u0) return 0.0;
    if (beta1 == 0.0) return 0.5 * (u1 - u0) * z / (1.0 + z);
    if (beta1 == 2.0) return 0.5 * z * std::log((u1 + z) / (u0 + z));
    if (beta1 == 4.0) {
        const double sz = std::sqrt(z);
        return 0.5 * sz * (std::atan(u1 / sz) - std::atan(u0 / sz));
    }
    const double half = 0.5 * beta1;
    auto f = [z, half](double w) { return z / (std::pow(w, half) + z); };
    return 0.5 * integrate(f, u0, u1, spec).value;
}

// int_{sqrt(u0)}^{sqrt(u1)} (1 - e^{-c v^{-beta1}}) v dv for a fixed fading
// draw, via the incomplete gamma of negative order -2/beta1.
double annulus_integral_fixed(double c, double beta1, double u0, double u1) {
    if (c <= 0.0 || u1 <= u0) return 0.0;
    if (beta1 == 0.0) return -0.5 * (u1 - u0) * std::expm1(-c);
    const double s = -2.0 / beta1;
    const double lo = c * std::pow(u0, -0.5 * beta1);
    const double hi = c * std::pow(u1, -0.5 * beta1);
    const double bracket = upper_incomplete_gamma(s, lo) - upper_incomplete_gamma(s, hi);
    const double v = 0.5 * (u1 - u0) + std::pow(c, -s) / beta1 * bracket;
    return v > 0.0 ? v : 0.0;
}

// int_L^inf (1 - e^{-c w^{-beta2}}) w dw for a fixed fading draw, expressed
// through the normalized argument cn = c * L^{-beta2}, divided by L^2:
//   (cn^{2/beta2}/beta2) * (Gamma(-2/beta2, cn) - Gamma(-2/beta2)) - 1/2.
double far_unit_fixed(double cn, double beta2) {
    if (cn <= 0.0) return 0.0;
    const double s = -2.0 / beta2;
    const double v =
        std::pow(cn, -s) / beta2 * (upper_incomplete_gamma(s, cn) - std::tgamma(s)) - 0.5;
    return v > 0.0 ? v : 0.0;
}

// Per-unit-area coefficient of the far-branch interference exponent: with
// cn_k = x a_k alpha0 d0^{beta2-beta1} L^{-beta2}, the exponent contribution
// of interferers beyond L equals pi * lambda * L^2 * far_coefficient.
double far_coefficient(const std::array<double, 4>& cn, const LaplaceContext& c) {
    const GainDistribution& d = c.dist;
    if (c.fading->is_exponential()) {
        const double m = c.fading->rate();
        double sum = 0.0;
        for (int k = 0; k < 4; ++k) {
            if (d.probs[k] <= 0.0 || cn[k] <= 0.0) continue;
            sum += d.probs[k] * rho(cn[k] / m, c.beta2, c.inner);
        }
        return sum;
    }
    auto f = [&](double g) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            if (d.probs[k] <= 0.0 || cn[k] <= 0.0) continue;
            acc += d.probs[k] * far_unit_fixed(cn[k] * g, c.beta2);
        }
        return 2.0 * acc * c.fading->density(g);
    };
    return integrate(f, 0.0, kInf, c.inner).value;
}

// sum_k b_k * (annulus integral with fading folded in), for interferers in
// (sqrt(u), d0). Exponent contribution = 2 pi lambda times this.
double annulus_sum(double x, double u, const LaplaceContext& c) {
    const GainDistribution& d = c.dist;
    if (c.fading->is_exponential()) {
        const double m = c.fading->rate();
        double sum = 0.0;
        for (int k = 0; k < 4; ++k) {
            if (d.probs[k] <= 0.0 || d.gains[k] <= 0.0) continue;
            const double z = x * d.gains[k] * c.alpha0 / m;
            sum += d.probs[k] * annulus_integral_exp(z, c.beta1, u, c.d0sq, c.inner);
        }
        return sum;
    }
    auto f = [&](double g) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            if (d.probs[k] <= 0.0 || d.gains[k] <= 0.0) continue;
            acc += d.probs[k] *
                   annulus_integral_fixed(x * g * d.gains[k] * c.alpha0, c.beta1, u, c.d0sq);
        }
        return acc * c.fading->density(g);
    };
    return integrate(f, 0.0, kInf, c.inner).value;
}

std::array<double, 4> normalized_far_args(double x, double lsq, const LaplaceContext& c) {
    const double scale =
        x * c.alpha0 * std::pow(c.d0, c.beta2 - c.beta1) * std::pow(lsq, -0.5 * c.beta2);
    std::array<double, 4> cn{};
    for (int k = 0; k < 4; ++k) cn[k] = scale * c.dist.gains[k];
    return cn;
}

// -ln of the conditional interference Laplace transform, serving distance
// sqrt(u) inside the breakpoint.
double exponent_near_serving(double x, double u, const LaplaceContext& c) {
    const double annulus = 2.0 * kPi * c.lambda * annulus_sum(x, u, c);
    const double far =
        kPi * c.lambda * c.d0sq * far_coefficient(normalized_far_args(x, c.d0sq, c), c);
    return annulus + far;
}

// Same with the serving distance sqrt(u) at or beyond the breakpoint.
double exponent_far_serving(double x, double u, const LaplaceContext& c) {
    return kPi * c.lambda * u * far_coefficient(normalized_far_args(x, u, c), c);
}

void check_corollary_conditions(const NetworkParams& params) {
    if (params.sigma2 != 0.0)
        throw PreconditionError("coverage_simplified: requires sigma2 == 0");
    if (params.beams.side_bs != 0.0 || params.beams.side_ue != 0.0)
        throw PreconditionError("coverage_simplified: requires zero side lobe gains");
    if (params.model.beta1 != 0.0)
        throw PreconditionError("coverage_simplified: requires beta1 == 0");
}

// Closed-form interference-limited coverage at threshold tau.
double simplified_at(double nu, double q, double tau, double beta2, const QuadratureSpec& spec) {
    if (!std::isfinite(tau)) return 0.0;
    const double s = tau / (1.0 + tau);
    const double r = rho(tau, beta2, spec);
    if (!std::isfinite(r)) return 0.0;
    const double denom = 1.0 - q * s;
    if (denom <= 0.0) return 0.0;  // q == 1 with s rounded to 1; true value underflows
    const double e1 = std::exp(-nu * q * (s + r));
    const double e2 = std::exp(-nu * (1.0 + q * r));
    return e1 / denom - q * (s + r) / (denom * (1.0 + q * r)) * e2;
}

std::vector<double> serving_split_points(double lambda, double d0sq) {
    const double u_med = kLn2 / (lambda * kPi);
    std::vector<double> splits;
    for (double m : {1.0, 4.0, 16.0}) {
        const double u = m * u_med;
        if (u < d0sq * 0.999) splits.push_back(u);
    }
    return splits;
}

CoverageResult coverage_impl(const NetworkParams& params, const FadingSpec& fading,
                             const QuadratureSpec& spec) {
    const LaplaceContext ctx = make_context(params, fading, spec);
    const double lam_pi = params.lambda * kPi;
    const double nn = params.beams.main_bs * params.beams.main_ue;
    const double t = params.threshold;
    const double mu = params.mu;
    const double a0 = params.model.alpha0;
    const double b1 = params.model.beta1;
    const double b2 = params.model.beta2;
    const double d0 = params.model.d0;
    const double d0sq = ctx.d0sq;

    const std::vector<double> splits = serving_split_points(params.lambda, d0sq);
    QuadratureResult near;
    if (b1 == 0.0) {
        // The transform argument does not depend on the serving distance, so
        // the per-unit-area exponent coefficients can be hoisted.
        const double x = mu * t / (nn * a0);
        double slope = 0.0;  // sum_k b_k E_g[1 - e^{-x a_k alpha0 g}]
        if (fading.is_exponential()) {
            const double m = fading.rate();
            for (int k = 0; k < 4; ++k) {
                const double z = x * ctx.dist.gains[k] * a0 / m;
                if (ctx.dist.probs[k] > 0.0) slope += ctx.dist.probs[k] * z / (1.0 + z);
            }
        } else {
            auto f = [&](double g) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) {
                    if (ctx.dist.probs[k] <= 0.0 || ctx.dist.gains[k] <= 0.0) continue;
                    acc -= ctx.dist.probs[k] * std::expm1(-x * g * ctx.dist.gains[k] * a0);
                }
                return acc * fading.density(g);
            };
            slope = integrate(f, 0.0, kInf, ctx.inner).value;
        }
        const double tail =
            lam_pi * d0sq * far_coefficient(normalized_far_args(x, d0sq, ctx), ctx);
        const double base = x * params.sigma2 + lam_pi * d0sq * slope + tail;
        auto near_integrand = [&](double u) {
            return lam_pi * std::exp(-(base + lam_pi * u * (1.0 - slope)));
        };
        near = integrate(near_integrand, 0.0, d0sq, spec, splits);
    } else {
        auto near_integrand = [&](double u) {
            const double x = mu * t * std::pow(u, 0.5 * b1) / (nn * a0);
            const double e = lam_pi * u + x * params.sigma2 + exponent_near_serving(x, u, ctx);
            return lam_pi * std::exp(-e);
        };
        near = integrate(near_integrand, 0.0, d0sq, spec, splits);
    }

    // Beyond the breakpoint the interference exponent is linear in u = r0^2
    // with a coefficient that does not depend on u; precompute it.
    std::array<double, 4> cn{};
    for (int k = 0; k < 4; ++k) cn[k] = mu * t * ctx.dist.gains[k] / nn;
    const double c_far = far_coefficient(cn, ctx);
    const double x2_scale = mu * t * std::pow(d0, b1 - b2) / (nn * a0);
    auto far_integrand = [&](double u) {
        const double e =
            lam_pi * (1.0 + c_far) * u + x2_scale * std::pow(u, 0.5 * b2) * params.sigma2;
        return lam_pi * std::exp(-e);
    };
    QuadratureSpec far_spec = spec;
    const double fold_scale = 1.0 / (lam_pi * (1.0 + c_far));
    far_spec.tail_cutoff_probability =
        std::clamp(1.0 / (1.0 + fold_scale), 1e-12, 1.0 - 1e-12);
    const QuadratureResult far = integrate(far_integrand, d0sq, kInf, far_spec);

    double value = near.value + far.value;
    double err = near.abs_error + far.abs_error;
    if (value < 0.0) {
        err += -value;
        value = 0.0;
    } else if (value > 1.0) {
        err += value - 1.0;
        value = 1.0;
    }
    return {value, err};
}

}  // namespace

FadingSpec FadingSpec::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw PreconditionError("FadingSpec: exponential rate must be > 0");
    FadingSpec f;
    f.rate_ = rate;
    return f;
}

FadingSpec FadingSpec::custom(std::function<double(double)> density, const QuadratureSpec& spec) {
    if (!density) throw PreconditionError("FadingSpec: custom density must be callable");
    const double splits[] = {0.1, 1.0, 10.0};
    const QuadratureResult mass =
        integrate([&](double g) { return density(g); }, 0.0, kInf, spec, splits);
    if (std::abs(mass.value - 1.0) > 10.0 * spec.rel_tol + mass.abs_error)
        throw PreconditionError("FadingSpec: density integrates to " +
                                std::to_string(mass.value) + ", not 1");
    FadingSpec f;
    f.density_ = std::move(density);
    return f;
}

double FadingSpec::rate() const {
    if (!is_exponential()) throw PreconditionError("FadingSpec: rate() requires exponential kind");
    return rate_;
}

double FadingSpec::density(double g) const {
    if (is_exponential()) throw PreconditionError("FadingSpec: density() requires custom kind");
    return g >= 0.0 ? density_(g) : 0.0;
}

double laplace_interference_near(double x, const NetworkParams& params, const FadingSpec& fading,
                                 double r0, const QuadratureSpec& spec) {
    params.validate();
    if (!(x >= 0.0)) throw DomainError("laplace_interference_near: x must be >= 0");
    if (!(r0 > 0.0 && r0 < params.model.d0))
        throw PreconditionError("laplace_interference_near: r0 must lie in (0, d0)");
    if (x == 0.0) return 1.0;
    const LaplaceContext ctx = make_context(params, fading, spec);
    return std::exp(-exponent_near_serving(x, r0 * r0, ctx));
}

double laplace_interference_far(double x, const NetworkParams& params, const FadingSpec& fading,
                                double r0, const QuadratureSpec& spec) {
    params.validate();
    if (!(x >= 0.0)) throw DomainError("laplace_interference_far: x must be >= 0");
    if (!(r0 >= params.model.d0))
        throw PreconditionError("laplace_interference_far: r0 must be >= d0");
    if (x == 0.0) return 1.0;
    const LaplaceContext ctx = make_context(params, fading, spec);
    return std::exp(-exponent_far_serving(x, r0 * r0, ctx));
}

CoverageResult coverage_probability(const NetworkParams& params, const FadingSpec& fading,
                                    const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    return coverage_impl(params, fading, spec);
}

double coverage_simplified(const NetworkParams& params, const QuadratureSpec& spec) {
    params.validate();
    check_corollary_conditions(params);
    const double q = params.beams.alignment_probability();
    const double nu = params.lambda * kPi * params.model.d0 * params.model.d0;
    return simplified_at(nu, q, params.threshold, params.model.beta2, spec);
}

AseResult ase_detail(const NetworkParams& params, const FadingSpec& fading,
                     const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    const QuadratureSpec inner = tighten(spec);
    NetworkParams at_tau = params;
    auto integrand = [&](double t) {
        const double tau = std::expm1(t);
        if (!std::isfinite(tau)) return 0.0;
        at_tau.threshold = tau;
        return coverage_impl(at_tau, fading, inner).value;
    };
    const double lt = std::log1p(params.threshold);
    const QuadratureResult tail = integrate(integrand, lt, kInf, spec);
    const CoverageResult at_threshold = coverage_impl(params, fading, spec);

    const double lam = params.lambda;
    double value = lam * (tail.value / kLn2 + (lt / kLn2) * at_threshold.value);
    double err = lam * (tail.abs_error / kLn2 + (lt / kLn2) * at_threshold.est_abs_error);
    if (value < 0.0) {
        err += -value;
        value = 0.0;
    }
    return {value, err};
}

double ase(const NetworkParams& params, const FadingSpec& fading, const QuadratureSpec& spec) {
    return ase_detail(params, fading, spec).value;
}

AseResult ase_simplified_detail(const NetworkParams& params, const QuadratureSpec& spec) {
    params.validate();
    spec.validate();
    check_corollary_conditions(params);
    const QuadratureSpec inner = tighten(spec);
    const double q = params.beams.alignment_probability();
    const double nu = params.lambda * kPi * params.model.d0 * params.model.d0;
    const double b2 = params.model.beta2;
    auto integrand = [&](double t) {
        return simplified_at(nu, q, std::expm1(t), b2, inner);
    };
    const double lt = std::log1p(params.threshold);
    const QuadratureResult tail = integrate(integrand, lt, kInf, spec);
    const double cov = simplified_at(nu, q, params.threshold, b2, inner);

    const double lam = params.lambda;
    double value = lam * (tail.value / kLn2 + (lt / kLn2) * cov);
    double err = lam * tail.abs_error / kLn2;
    if (value < 0.0) {
        err += -value;
        value = 0.0;
    }
    return {value, err};
}

double ase_simplified(const NetworkParams& params, const QuadratureSpec& spec) {
    return ase_simplified_detail(params, spec).value;
}

}  // namespace udn
