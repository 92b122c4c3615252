#include "udn/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace udn {
namespace {

constexpr int kMaxIter = 400;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;

// Regularized-style series for the lower integral: Gamma(s,x) = Gamma(s) - g,
// g = x^s e^-x sum_n x^n / (s (s+1) ... (s+n)). Requires s > 0, x < s + 1.
double gamma_upper_series(double s, double x) {
    double ap = s;
    double del = 1.0 / s;
    double sum = del;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) {
            double g = sum * std::exp(s * std::log(x) - x);
            return std::tgamma(s) - g;
        }
    }
    throw NonConvergenceError("upper_incomplete_gamma: series stalled", std::tgamma(s), 1.0);
}

// Continued fraction (modified Lentz), valid for x > 0 and x >= s + 1:
// Gamma(s,x) = e^-x x^s / (x+1-s - 1(1-s)/(x+3-s - 2(2-s)/(...))).
double gamma_upper_cf(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return std::exp(s * std::log(x) - x) * h;
    }
    throw NonConvergenceError("upper_incomplete_gamma: continued fraction stalled",
                              std::exp(s * std::log(x) - x) * h, 1.0);
}

double gamma_upper_positive(double s, double x) {
    if (x == 0.0) return std::tgamma(s);
    return (x < s + 1.0) ? gamma_upper_series(s, x) : gamma_upper_cf(s, x);
}

double e1_series(double x) {
    // E1 = -euler - ln x + sum_{n>=1} (-1)^(n+1) x^n / (n n!), for x <= 1.
    constexpr double kEuler = 0.57721566490153286060651209008240;
    double sum = 0.0;
    double term = 1.0;
    for (int n = 1; n <= kMaxIter; ++n) {
        term *= -x / n;
        double contrib = -term / n;
        sum += contrib;
        if (std::abs(contrib) < std::abs(sum) * kEps) break;
    }
    return -kEuler - std::log(x) + sum;
}

double e1_cf(double x) {
    // E1(x) = e^-x / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))), for x > 1.
    double b = x + 1.0;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x) * h;
}

bool is_nonpositive_integer(double s) { return s <= 0.0 && s == std::floor(s); }

}  // namespace

double exponential_integral_e1(double x) {
    if (!(x > 0.0)) throw DomainError("exponential_integral_e1: requires x > 0");
    return (x <= 1.0) ? e1_series(x) : e1_cf(x);
}

double upper_incomplete_gamma(double s, double x) {
    if (std::isnan(s) || std::isnan(x)) throw DomainError("upper_incomplete_gamma: NaN argument");
    if (x < 0.0) throw DomainError("upper_incomplete_gamma: requires x >= 0");
    if (x == 0.0) {
        if (s <= 0.0)
            throw DomainError("upper_incomplete_gamma: diverges at x = 0 for s <= 0");
        return std::tgamma(s);
    }
    if (s > 0.0) return gamma_upper_positive(s, x);

    // s <= 0: recurse downward from a seed of positive (or zero) order using
    //   Gamma(s-1, x) = (Gamma(s, x) - x^(s-1) e^-x) / (s - 1).
    // Nonpositive-integer orders pass through s = 0 where the seed is E1.
    double seed_s;
    if (is_nonpositive_integer(s)) {
        seed_s = 0.0;
        if (s == 0.0) return exponential_integral_e1(x);
    } else {
        seed_s = s - std::floor(s);  // in (0, 1)
    }
    double g = (seed_s == 0.0) ? exponential_integral_e1(x) : gamma_upper_positive(seed_s, x);
    const double emx = std::exp(-x);
    double cur = seed_s;
    while (cur > s + 0.5) {
        double next = cur - 1.0;
        g = (g - std::pow(x, next) * emx) / next;
        cur = next;
    }
    return g;
}

double rho_quadrature(double x, double y, const QuadratureSpec& spec) {
    if (!(y > 2.0)) throw DomainError("rho: diverges for y <= 2");
    if (x < 0.0) throw DomainError("rho: requires x >= 0");
    if (x == 0.0) return 0.0;
    const double p = 0.5 * y;
    const double lower = std::pow(x, -2.0 / y);
    // The folded semi-infinite form stalls when the tail decays as slowly as
    // u^-p with p near 1, so beyond a cut the expansion
    //   1/(1+w) = 1/w - 1/w^2 + 1/(w^2 (1+w)),  w = u^p
    // is integrated exactly in its first two terms; the remainder falls like
    // u^-3p and folds cleanly.
    const double cut = std::max(2.0 * lower, 4.0);
    auto f = [p](double u) { return 1.0 / (1.0 + std::pow(u, p)); };
    const double head = integrate(f, lower, cut, spec).value;
    const double exact_tail = std::pow(cut, 1.0 - p) / (p - 1.0) -
                              std::pow(cut, 1.0 - 2.0 * p) / (2.0 * p - 1.0);
    auto remainder = [p](double u) {
        const double w = std::pow(u, p);
        return 1.0 / (w * w * (1.0 + w));
    };
    const double rem =
        integrate(remainder, cut, std::numeric_limits<double>::infinity(), spec).value;
    return std::pow(x, 2.0 / y) * (head + exact_tail + rem);
}

double rho(double x, double y, const QuadratureSpec& spec) {
    if (!(y > 2.0)) throw DomainError("rho: diverges for y <= 2");
    if (x < 0.0) throw DomainError("rho: requires x >= 0");
    if (x == 0.0) return 0.0;
    if (y == 4.0) {
        double sx = std::sqrt(x);
        return sx * std::atan(sx);
    }
    return rho_quadrature(x, y, spec);
}

}  // namespace udn
