#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

// Deterministic elementary functions for the simulation kernels. libm's log
// and exp vary between implementations and cannot be reproduced inside a SIMD
// lane, so the kernels use these instead; the vector code mirrors the exact
// operation sequence (every step is a correctly rounded IEEE op or an fma),
// which makes scalar and vector results bit-identical. Accuracy is a few ulp,
// plenty for sampling.
//
// Preconditions: inputs are finite and normal; log requires x > 0, exp
// requires |x| < 700. The kernels only produce such values.

namespace udn::mc::pm {

inline constexpr double kLn2Hi = 0x1.62e42feep-1;
inline constexpr double kLn2Lo = 0x1.a39ef35793c76p-33;
inline constexpr double kLog2E = 0x1.71547652b82fep+0;
inline constexpr double kSqrtTwo = 0x1.6a09e667f3bcdp+0;
inline constexpr double kTwo52 = 0x1p52;

inline double log(double x) {
    const uint64_t bits = std::bit_cast<uint64_t>(x);
    const double raw_exp = static_cast<double>(bits >> 52);  // exact, < 2^11
    const uint64_t mant_bits = (bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull;
    double m = std::bit_cast<double>(mant_bits);  // [1, 2)
    double e = raw_exp - 1023.0;
    if (m >= kSqrtTwo) {
        m = 0.5 * m;
        e = e + 1.0;
    }
    const double s = (m - 1.0) / (m + 1.0);
    const double r = s * s;
    double p = 1.0 / 21.0;
    p = std::fma(r, p, 1.0 / 19.0);
    p = std::fma(r, p, 1.0 / 17.0);
    p = std::fma(r, p, 1.0 / 15.0);
    p = std::fma(r, p, 1.0 / 13.0);
    p = std::fma(r, p, 1.0 / 11.0);
    p = std::fma(r, p, 1.0 / 9.0);
    p = std::fma(r, p, 1.0 / 7.0);
    p = std::fma(r, p, 1.0 / 5.0);
    p = std::fma(r, p, 1.0 / 3.0);
    const double sr = s * r;
    const double lnm = std::fma(sr + sr, p, s + s);
    return std::fma(e, kLn2Hi, std::fma(e, kLn2Lo, lnm));
}

inline double exp(double x) {
    const double kd = std::nearbyint(x * kLog2E);
    double r = std::fma(kd, -kLn2Hi, x);
    r = std::fma(kd, -kLn2Lo, r);
    double p = 1.0 / 6227020800.0;  // 1/13!
    p = std::fma(r, p, 1.0 / 479001600.0);
    p = std::fma(r, p, 1.0 / 39916800.0);
    p = std::fma(r, p, 1.0 / 3628800.0);
    p = std::fma(r, p, 1.0 / 362880.0);
    p = std::fma(r, p, 1.0 / 40320.0);
    p = std::fma(r, p, 1.0 / 5040.0);
    p = std::fma(r, p, 1.0 / 720.0);
    p = std::fma(r, p, 1.0 / 120.0);
    p = std::fma(r, p, 1.0 / 24.0);
    p = std::fma(r, p, 1.0 / 6.0);
    p = std::fma(r, p, 0.5);
    p = std::fma(r, p, 1.0);
    p = std::fma(r, p, 1.0);
    const auto k = static_cast<int64_t>(kd);
    const double scale = std::bit_cast<double>(static_cast<uint64_t>(k + 1023) << 52);
    return p * scale;
}

}  // namespace udn::mc::pm
