#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "udn/special_functions.hpp"

using udn::exponential_integral_e1;
using udn::rho;
using udn::rho_quadrature;
using udn::upper_incomplete_gamma;

TEST_CASE("upper incomplete gamma: pinned values") {
    CHECK(upper_incomplete_gamma(1.0, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(upper_incomplete_gamma(0.5, 0.0) ==
          doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
    CHECK(upper_incomplete_gamma(3.0, 0.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(upper_incomplete_gamma(5.0, 0.0) == doctest::Approx(24.0).epsilon(1e-12));
}

TEST_CASE("negative order against the erfc closed form") {
    // Gamma(-1/2, x) = 2 (e^-x / sqrt(x) - sqrt(pi) erfc(sqrt(x)))
    for (const double x : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        const double oracle =
            2.0 * (std::exp(-x) / std::sqrt(x) -
                   std::sqrt(std::numbers::pi) * std::erfc(std::sqrt(x)));
        CHECK(upper_incomplete_gamma(-0.5, x) == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("order-zero case equals the exponential integral") {
    CHECK(exponential_integral_e1(1.0) ==
          doctest::Approx(0.21938393439552029).epsilon(1e-10));
    for (const double x : {0.1, 0.5, 2.0, 8.0}) {
        CHECK(upper_incomplete_gamma(0.0, x) ==
              doctest::Approx(exponential_integral_e1(x)).epsilon(1e-10));
    }
}

TEST_CASE("recurrence Gamma(s+1,x) = s Gamma(s,x) + x^s e^-x on random orders") {
    std::mt19937 rng(20240915);
    std::uniform_real_distribution<double> s_dist(-2.0, 3.0);
    std::uniform_real_distribution<double> logx_dist(std::log(0.05), std::log(20.0));
    int tested = 0;
    while (tested < 200) {
        const double s = s_dist(rng);
        if (std::abs(s - std::round(s)) < 0.01) continue;  // poles of the recurrence path
        const double x = std::exp(logx_dist(rng));
        const double lhs = upper_incomplete_gamma(s + 1.0, x);
        const double direct = s * upper_incomplete_gamma(s, x) + std::pow(x, s) * std::exp(-x);
        const double scale =
            std::max({std::abs(lhs), std::abs(std::pow(x, s) * std::exp(-x)), 1e-290});
        CHECK(std::abs(lhs - direct) <= 1e-7 * scale);
        ++tested;
    }
}

TEST_CASE("rho at y = 4 matches sqrt(x) atan(sqrt(x)) on a log grid") {
    for (int i = 0; i <= 24; ++i) {
        const double x = std::pow(10.0, -3.0 + 0.25 * i);
        const double closed = std::sqrt(x) * std::atan(std::sqrt(x));
        CHECK(rho(x, 4.0) == doctest::Approx(closed).epsilon(1e-12));
        CHECK(rho_quadrature(x, 4.0) == doctest::Approx(closed).epsilon(1e-7));
    }
}

TEST_CASE("rho grows with x and shrinks with y") {
    CHECK(rho(0.0, 4.0) == 0.0);
    double prev = 0.0;
    for (const double x : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double v = rho(x, 3.0);
        CHECK(v > prev);
        prev = v;
    }
    for (const double x : {0.5, 5.0}) {
        CHECK(rho(x, 2.5) > rho(x, 3.0));
        CHECK(rho(x, 3.0) > rho(x, 4.0));
        CHECK(rho(x, 4.0) > rho(x, 6.0));
    }
}

TEST_CASE("rho general-exponent path agrees with its quadrature form") {
    for (const double y : {2.5, 3.0, 3.5, 5.0, 6.0}) {
        for (const double x : {0.1, 1.0, 5.0}) {
            CHECK(rho(x, y) == doctest::Approx(rho_quadrature(x, y)).epsilon(1e-9));
        }
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(upper_incomplete_gamma(1.0, -0.5), udn::DomainError);
    CHECK_THROWS_AS(upper_incomplete_gamma(0.0, 0.0), udn::DomainError);
    CHECK_THROWS_AS(upper_incomplete_gamma(-1.5, 0.0), udn::DomainError);
    CHECK_THROWS_AS(rho(-1.0, 4.0), udn::DomainError);
    CHECK_THROWS_AS(rho(1.0, 2.0), udn::DomainError);
}
