#pragma once

#include <cmath>
#include <cstdint>

#include "udn/mc/philox.hpp"

namespace udn::mc {

// Poisson counts driven by a UniformCursor. Product-of-uniforms search below
// mean 12, transformed rejection with squeeze (Hormann's PTRS, valid for
// mean >= 10) above it. Uses libm scalars only; counts feed the kernels but
// never mix into their vector lanes, so cross-kernel bit identity is
// unaffected.
struct PoissonSampler {
    double mean = 1.0;
    bool small = true;
    double exp_neg_mean = 0.0;
    double b = 0.0, a = 0.0, inv_alpha = 0.0, vr = 0.0, log_mean = 0.0;

    void init(double m) {
        mean = m;
        small = m < 12.0;
        if (small) {
            exp_neg_mean = std::exp(-m);
        } else {
            b = 0.931 + 2.53 * std::sqrt(m);
            a = -0.059 + 0.02483 * b;
            inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
            vr = 0.9277 - 3.6224 / (b - 2.0);
            log_mean = std::log(m);
        }
    }

    uint64_t draw(UniformCursor& cur) const {
        if (small) {
            uint64_t k = 0;
            double p = 1.0;
            do {
                p *= cur.next();
                ++k;
            } while (p > exp_neg_mean);
            return k - 1;
        }
        for (;;) {
            const double u = cur.next() - 0.5;
            const double v = cur.next();
            const double us = 0.5 - std::abs(u);
            const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<uint64_t>(kd);
            if (kd < 0.0) continue;
            if (us < 0.013 && v > us) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                kd * log_mean - mean - std::lgamma(kd + 1.0)) {
                return static_cast<uint64_t>(kd);
            }
        }
    }
};

}  // namespace udn::mc
