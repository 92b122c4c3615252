#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "udn/analytic.hpp"
#include "udn/network_model.hpp"
#include "udn/units.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Independent evaluation of E[e^{-xI} | r0] for exponential interferer fading:
// exp(-2 pi lambda sum_k p_k int_{r0}^inf t * c G_k L(t) / (1 + c G_k L(t)) dt),
// c = x/mu. Composite Simpson over [r0, d0] plus geometric far blocks out to
// where the t^(1-beta2) tail is negligible.
double laplace_oracle(double x, const udn::NetworkParams& p, double r0) {
    const udn::GainDistribution d = udn::gain_distribution(p.beams);
    const double c = x / p.mu;
    double expo = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (d.probs[k] == 0.0 || d.gains[k] == 0.0) continue;
        auto f = [&](double t) {
            const double gl = c * d.gains[k] * udn::path_loss(t, p.model);
            return t * gl / (1.0 + gl);
        };
        double total = 0.0;
        double lo = r0;
        if (p.model.d0 > r0) {
            total += simpson(f, r0, p.model.d0, 800);
            lo = p.model.d0;
        }
        while (lo < 1e6) {
            const double hi = lo * 4.0;
            total += simpson(f, lo, hi, 400);
            lo = hi;
        }
        expo += d.probs[k] * total;
    }
    return std::exp(-2.0 * kPi * p.lambda * expo);
}

double coverage_oracle(const udn::NetworkParams& p) {
    const double nn = p.beams.main_bs * p.beams.main_ue;
    auto integrand = [&](double r0) {
        if (r0 <= 0.0) return 0.0;
        const double loss = udn::path_loss(r0, p.model);
        const double x = p.mu * p.threshold / (nn * loss);
        return 2.0 * kPi * p.lambda * r0 * std::exp(-p.lambda * kPi * r0 * r0) *
               std::exp(-x * p.sigma2) * laplace_oracle(x, p, r0);
    };
    const double rmax = std::sqrt(30.0 / (p.lambda * kPi));
    double total = simpson(integrand, 0.0, std::min(p.model.d0, rmax), 200);
    if (rmax > p.model.d0) total += simpson(integrand, p.model.d0, rmax, 400);
    return total;
}

udn::NetworkParams sectioned_defaults() {
    udn::NetworkParams p;
    p.lambda = 1e-3;
    p.mu = 1.0;
    p.threshold = udn::db_to_linear(7.0);
    p.model.alpha0 = 1.0;
    p.model.beta1 = 2.0;
    p.model.beta2 = 4.0;
    p.model.d0 = 10.0;
    p.sigma2 = p.model.alpha0 * std::pow(p.model.d0, -p.model.beta1) / 100.0;
    p.beams.main_bs = 100.0;
    p.beams.side_bs = 1.0;
    p.beams.width_bs = kPi / 6.0;
    p.beams.main_ue = 10.0;
    p.beams.side_ue = 0.1;
    p.beams.width_ue = kPi / 2.0;
    return p;
}

udn::NetworkParams closed_form_eligible() {
    udn::NetworkParams p = sectioned_defaults();
    p.sigma2 = 0.0;
    p.model.beta1 = 0.0;
    p.beams.side_bs = 0.0;
    p.beams.side_ue = 0.0;
    return p;
}

}  // namespace

TEST_CASE("interference transform matches a composite-Simpson oracle") {
    const udn::NetworkParams p = sectioned_defaults();
    const double nn = p.beams.main_bs * p.beams.main_ue;
    for (const double r0 : {2.0, 5.0, 9.0}) {
        const double x = p.mu * p.threshold / (nn * udn::path_loss(r0, p.model));
        const double got = udn::laplace_interference_near(x, p, udn::FadingSpec::exponential(p.mu), r0);
        const double want = laplace_oracle(x, p, r0);
        CHECK(got == doctest::Approx(want).epsilon(1e-5));
    }
    for (const double r0 : {10.0, 15.0, 30.0}) {
        const double x = p.mu * p.threshold / (nn * udn::path_loss(r0, p.model));
        const double got = udn::laplace_interference_far(x, p, udn::FadingSpec::exponential(p.mu), r0);
        const double want = laplace_oracle(x, p, r0);
        CHECK(got == doctest::Approx(want).epsilon(1e-5));
    }
    // x ~ 0 carries no attenuation
    CHECK(udn::laplace_interference_near(1e-12, p, udn::FadingSpec::exponential(p.mu), 5.0) ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("custom fading density reproduces the exponential path") {
    const udn::NetworkParams p = sectioned_defaults();
    const auto expo = udn::FadingSpec::exponential(p.mu);
    const auto dens = udn::FadingSpec::custom(
        [mu = p.mu](double g) { return mu * std::exp(-mu * g); });
    for (const double r0 : {4.0, 12.0}) {
        const double x = 0.05;
        const double a = r0 < p.model.d0
                             ? udn::laplace_interference_near(x, p, expo, r0)
                             : udn::laplace_interference_far(x, p, expo, r0);
        const double b = r0 < p.model.d0
                             ? udn::laplace_interference_near(x, p, dens, r0)
                             : udn::laplace_interference_far(x, p, dens, r0);
        CHECK(a == doctest::Approx(b).epsilon(1e-6));
    }
}

TEST_CASE("coverage probability matches the Simpson oracle") {
    udn::NetworkParams p = sectioned_defaults();
    {
        const auto got = udn::coverage_probability(p, udn::FadingSpec::exponential(p.mu));
        const double want = coverage_oracle(p);
        CHECK(std::abs(got.value - want) <= 1e-4 + 3.0 * got.est_abs_error);
    }
    p.lambda = 1e-2;
    p.threshold = 1.0;
    p.model.beta1 = 1.5;
    p.model.beta2 = 3.3;
    p.model.d0 = 12.0;
    p.sigma2 = 1e-4;
    {
        const auto got = udn::coverage_probability(p, udn::FadingSpec::exponential(p.mu));
        const double want = coverage_oracle(p);
        CHECK(std::abs(got.value - want) <= 1e-4 + 3.0 * got.est_abs_error);
    }
}

TEST_CASE("closed form agrees with the general quadrature where it applies") {
    udn::NetworkParams p = closed_form_eligible();
    {
        const double closed = udn::coverage_simplified(p);
        const auto quad = udn::coverage_probability(p, udn::FadingSpec::exponential(p.mu));
        CHECK(std::abs(closed - quad.value) <= 1e-6 + 3.0 * quad.est_abs_error);
    }
    p.lambda = 5e-3;
    p.mu = 2.0;
    p.threshold = 1.0;
    p.model.beta2 = 3.3;
    p.model.d0 = 25.0;
    p.beams.main_bs = 50.0;
    p.beams.width_bs = 2.0 * kPi * 0.3;
    p.beams.main_ue = 4.0;
    p.beams.width_ue = 2.0 * kPi * 0.6;
    {
        const double closed = udn::coverage_simplified(p);
        const auto quad = udn::coverage_probability(p, udn::FadingSpec::exponential(p.mu));
        CHECK(std::abs(closed - quad.value) <= 1e-6 + 3.0 * quad.est_abs_error);
    }
}

TEST_CASE("single-slope omni limit reproduces 1/(1 + rho)") {
    const double threshold = udn::db_to_linear(7.0);
    const double rho = std::sqrt(threshold) * std::atan(std::sqrt(threshold));
    const double want = 1.0 / (1.0 + rho);

    // beta1 == beta2 makes the two branches one law regardless of d0
    udn::NetworkParams p;
    p.lambda = 1e-3;
    p.threshold = threshold;
    p.sigma2 = 0.0;
    p.model.beta1 = 4.0;
    p.model.beta2 = 4.0;
    p.model.d0 = 10.0;
    p.beams = udn::omni_pattern();
    const auto quad = udn::coverage_probability(p, udn::FadingSpec::exponential(1.0));
    CHECK(std::abs(quad.value - want) <= 1e-6 + 3.0 * quad.est_abs_error);

    // shrinking d0 in the flat-near-field closed form approaches the same value
    udn::NetworkParams c = closed_form_eligible();
    c.threshold = threshold;
    c.model.d0 = 1e-3;
    c.beams.main_bs = 1.0;
    c.beams.width_bs = 2.0 * kPi;
    c.beams.main_ue = 1.0;
    c.beams.width_ue = 2.0 * kPi;
    CHECK(udn::coverage_simplified(c) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("coverage limits and monotonicity") {
    udn::NetworkParams p = sectioned_defaults();
    p.threshold = 1e-6;
    const auto near_one = udn::coverage_probability(p, udn::FadingSpec::exponential(p.mu));
    CHECK(near_one.value > 0.999);
    CHECK(near_one.value <= 1.0);

    double prev = 2.0;
    for (const double t : {1.0, 3.0, 10.0}) {
        p.threshold = t;
        const auto cov = udn::coverage_probability(p, udn::FadingSpec::exponential(p.mu));
        CHECK(cov.value < prev);
        prev = cov.value;
    }

    udn::NetworkParams c = closed_form_eligible();
    prev = 2.0;
    for (const double q : {0.1, 0.3, 0.6, 1.0}) {
        const double w = 2.0 * kPi * std::sqrt(q);
        c.beams.width_bs = w;
        c.beams.width_ue = w;
        const double cov = udn::coverage_simplified(c);
        CHECK(cov < prev);
        prev = cov;
    }
}

TEST_CASE("spectral efficiency equals the rate-layer integral of coverage") {
    udn::NetworkParams c = closed_form_eligible();
    const double vt = std::log2(1.0 + c.threshold);
    auto cov_at_rate = [&c](double v) {
        udn::NetworkParams shifted = c;
        shifted.threshold = std::exp2(v) - 1.0;
        return udn::coverage_simplified(shifted);
    };
    const double per_bs =
        vt * udn::coverage_simplified(c) + simpson(cov_at_rate, vt, vt + 45.0, 512);
    const auto got = udn::ase_simplified_detail(c);
    CHECK(got.value == doctest::Approx(c.lambda * per_bs).epsilon(2e-4));
    CHECK(udn::ase_simplified(c) == got.value);

    udn::NetworkParams p = sectioned_defaults();
    const auto fading = udn::FadingSpec::exponential(p.mu);
    auto gen_cov_at_rate = [&](double v) {
        udn::NetworkParams shifted = p;
        shifted.threshold = std::exp2(v) - 1.0;
        return udn::coverage_probability(shifted, fading).value;
    };
    const double gvt = std::log2(1.0 + p.threshold);
    const double gen_per_bs = gvt * udn::coverage_probability(p, fading).value +
                              simpson(gen_cov_at_rate, gvt, gvt + 24.0, 64);
    const auto gen = udn::ase_detail(p, fading);
    CHECK(gen.value == doctest::Approx(p.lambda * gen_per_bs).epsilon(3e-3));
    CHECK(udn::ase(p, fading) == gen.value);
}

TEST_CASE("spectral efficiency dominates the threshold-rate floor") {
    udn::NetworkParams p = sectioned_defaults();
    const auto fading = udn::FadingSpec::exponential(p.mu);
    const auto cov = udn::coverage_probability(p, fading);
    const auto a = udn::ase_detail(p, fading);
    const double floor = p.lambda * std::log2(1.0 + p.threshold) *
                         (cov.value - 3.0 * cov.est_abs_error);
    CHECK(a.value + 3.0 * a.est_abs_error >= floor);
}

TEST_CASE("closed form rejects parameters outside its contract") {
    udn::NetworkParams p = closed_form_eligible();
    p.sigma2 = 1e-4;
    CHECK_THROWS_AS(udn::coverage_simplified(p), udn::PreconditionError);
    p = closed_form_eligible();
    p.model.beta1 = 1.0;
    CHECK_THROWS_AS(udn::coverage_simplified(p), udn::PreconditionError);
    p = closed_form_eligible();
    p.beams.side_bs = 0.5;
    CHECK_THROWS_AS(udn::coverage_simplified(p), udn::PreconditionError);
    p = closed_form_eligible();
    p.beams.side_ue = 0.01;
    CHECK_THROWS_AS(udn::ase_simplified(p), udn::PreconditionError);
}

TEST_CASE("fading spec accessors and normalization check") {
    const auto expo = udn::FadingSpec::exponential(2.5);
    CHECK(expo.is_exponential());
    CHECK(expo.rate() == 2.5);
    CHECK_THROWS_AS(udn::FadingSpec::exponential(0.0), udn::PreconditionError);
    CHECK_THROWS_AS(udn::FadingSpec::exponential(-1.0), udn::PreconditionError);
    // density integrating to 1/2 is refused
    CHECK_THROWS_AS(udn::FadingSpec::custom([](double g) { return 0.5 * std::exp(-g); }),
                    udn::PreconditionError);
    const auto dens = udn::FadingSpec::custom([](double g) { return std::exp(-g); });
    CHECK_FALSE(dens.is_exponential());
    CHECK(dens.density(0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}
