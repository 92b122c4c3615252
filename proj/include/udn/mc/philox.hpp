#pragma once

#include <cstdint>

// Philox4x32-10 counter generator. Every draw in the simulator is addressed
// by (seed, trial, stream, block), so trials are reproducible independent of
// evaluation order, worker count, or SIMD width.
//
// Counter word layout: (block, trial_lo, trial_hi, stream).
// Stream assignment per redraw attempt a of a trial:
//   4a     base-station draws; BS i owns blocks 2i (radius + gain pick)
//          and 2i+1 (fading)
//   4a+1   trial-level draws: block 0 serving fading, blocks 1.. the
//          Poisson count
//   4a+2   annulus base-station draws (window-doubling probe)
//   4a+3   annulus Poisson count

namespace udn::mc {

struct PhiloxKey {
    uint32_t k0 = 0;
    uint32_t k1 = 0;
};

struct PhiloxOut {
    uint32_t w0, w1, w2, w3;

    uint64_t u64_first() const { return static_cast<uint64_t>(w0) | (static_cast<uint64_t>(w1) << 32); }
    uint64_t u64_second() const { return static_cast<uint64_t>(w2) | (static_cast<uint64_t>(w3) << 32); }
};

inline constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline PhiloxOut philox_block(PhiloxKey key, uint32_t block, uint32_t trial_lo, uint32_t trial_hi,
                              uint32_t stream) {
    uint32_t x0 = block, x1 = trial_lo, x2 = trial_hi, x3 = stream;
    uint32_t k0 = key.k0, k1 = key.k1;
    for (int round = 0; round < 10; ++round) {
        const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * x0;
        const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * x2;
        const auto hi0 = static_cast<uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<uint32_t>(p0);
        const auto hi1 = static_cast<uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<uint32_t>(p1);
        x0 = hi1 ^ x1 ^ k0;
        x1 = lo1;
        x2 = hi0 ^ x3 ^ k1;
        x3 = lo0;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {x0, x1, x2, x3};
}

// Maps the top 52 bits to (0, 1]; 0 is excluded so -log stays finite.
inline double canonical_double(uint64_t u) {
    return (static_cast<double>(u >> 12) + 1.0) * 0x1p-52;
}

// Sequential uniforms from consecutive blocks of one stream, for the
// variable-length consumers (Poisson sampling).
struct UniformCursor {
    PhiloxKey key;
    uint32_t trial_lo = 0;
    uint32_t trial_hi = 0;
    uint32_t stream = 0;
    uint32_t block = 0;
    bool second_half = false;
    uint64_t pending = 0;

    double next() {
        uint64_t u;
        if (second_half) {
            u = pending;
            second_half = false;
        } else {
            const PhiloxOut out = philox_block(key, block++, trial_lo, trial_hi, stream);
            u = out.u64_first();
            pending = out.u64_second();
            second_half = true;
        }
        return canonical_double(u);
    }
};

}  // namespace udn::mc
