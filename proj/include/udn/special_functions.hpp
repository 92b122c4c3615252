#pragma once

#include "udn/quadrature.hpp"

namespace udn {

/// Upper incomplete gamma Gamma(s, x) = int_x^inf t^(s-1) e^(-t) dt.
/// Supports any real s for x > 0 (negative and nonpositive-integer orders
/// included) and s > 0 at x = 0, where it equals the complete gamma.
/// Throws DomainError for x < 0 or for (x == 0, s <= 0), where the integral
/// diverges.
double upper_incomplete_gamma(double s, double x);

/// Exponential integral E1(x) = Gamma(0, x), x > 0.
double exponential_integral_e1(double x);

/// Interference tail kernel
///   rho(x, y) = x^(2/y) * int_{x^(-2/y)}^inf du / (1 + u^(y/2)),
/// defined for x >= 0 and y > 2 (the integral diverges for y <= 2).
/// Uses the arctangent closed form at y = 4 and adaptive quadrature
/// otherwise.
double rho(double x, double y, const QuadratureSpec& spec = {});

/// Quadrature-only evaluation of rho, kept callable at every y for
/// cross-checking the closed-form path.
double rho_quadrature(double x, double y, const QuadratureSpec& spec = {});

}  // namespace udn
