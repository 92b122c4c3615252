#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "udn/mc/philox.hpp"
#include "udn/mc/portable_math.hpp"

// Per-trial inner loop of the simulator: draw every base station's radius,
// beam gain and fading, locate the nearest one, and accumulate the
// interference of the rest. Two implementations exist (scalar reference and
// AVX2); they are required to produce bit-identical TrialAggregate values,
// which the test suite checks directly. Everything here is deterministic in
// (key, trial, stream).

namespace udn::mc {

enum class LossKind : int { constant, half_power, general };

// One slope of the path loss law, pre-classified so the hot loop never calls
// libm. half_power covers 2*beta integer in [1, 8] through exactly specified
// mul/sqrt trees; general goes through pm::log / pm::exp.
struct SlopeEval {
    LossKind kind = LossKind::constant;
    double amplitude = 1.0;
    int twice_exponent = 0;          // half_power: 2*beta
    double neg_half_exponent = 0.0;  // general: -beta/2
};

struct KernelConfig {
    PhiloxKey key;
    uint64_t trial = 0;
    uint32_t stream = 0;
    double r2_scale = 1.0;   // squared radius = r2_offset + r2_scale * u
    double r2_offset = 0.0;
    double d0_sq = 0.0;      // near slope applies when r^2 < d0_sq
    SlopeEval near_eval;
    SlopeEval far_eval;
    double gain_value[4] = {1.0, 1.0, 1.0, 1.0};
    double gain_cut[3] = {1.0, 1.0, 1.0};  // cumulative pick probabilities
    double neg_fading_scale = -1.0;        // -1/mu: fading = log(u) * this
    bool exclude_nearest = true;           // false for the annulus probe
    uint64_t* gain_tally = nullptr;        // optional 4-slot counter (scalar kernel only)
};

struct TrialAggregate {
    double interference = 0.0;
    double serving_r2 = 0.0;
    uint32_t serving_index = 0;
};

namespace detail {

inline double eval_slope(const SlopeEval& ev, double r2) {
    switch (ev.kind) {
        case LossKind::constant:
            return ev.amplitude;
        case LossKind::half_power: {
            double p;
            switch (ev.twice_exponent) {
                case 2:
                    p = std::sqrt(r2);
                    break;
                case 4:
                    p = r2;
                    break;
                case 6:
                    p = r2 * std::sqrt(r2);
                    break;
                case 8:
                    p = r2 * r2;
                    break;
                case 1:
                    p = std::sqrt(std::sqrt(r2));
                    break;
                case 3: {
                    const double f = std::sqrt(std::sqrt(r2));
                    p = (f * f) * f;
                    break;
                }
                case 5: {
                    const double f = std::sqrt(std::sqrt(r2));
                    const double f2 = f * f;
                    p = (f2 * f2) * f;
                    break;
                }
                default: {  // 7
                    const double f = std::sqrt(std::sqrt(r2));
                    const double f2 = f * f;
                    const double f4 = f2 * f2;
                    p = (f4 * f2) * f;
                    break;
                }
            }
            return ev.amplitude / p;
        }
        default: {
            const double t = pm::log(r2);
            return ev.amplitude * pm::exp(t * ev.neg_half_exponent);
        }
    }
}

inline double eval_loss(const KernelConfig& cfg, double r2) {
    return r2 < cfg.d0_sq ? eval_slope(cfg.near_eval, r2) : eval_slope(cfg.far_eval, r2);
}

struct Pass1Value {
    double r2;
    double gain_u;
};

inline Pass1Value pass1_draw(const KernelConfig& cfg, uint32_t trial_lo, uint32_t trial_hi,
                             uint32_t i) {
    const PhiloxOut out = philox_block(cfg.key, 2 * i, trial_lo, trial_hi, cfg.stream);
    const double r2 = cfg.r2_offset + cfg.r2_scale * canonical_double(out.u64_first());
    return {r2, canonical_double(out.u64_second())};
}

inline double pass2_term(const KernelConfig& cfg, uint32_t trial_lo, uint32_t trial_hi, uint32_t i,
                         double r2, double gain_u) {
    const PhiloxOut out = philox_block(cfg.key, 2 * i + 1, trial_lo, trial_hi, cfg.stream);
    const double g = pm::log(canonical_double(out.u64_first())) * cfg.neg_fading_scale;
    int pick = 3;
    if (gain_u < cfg.gain_cut[0]) {
        pick = 0;
    } else if (gain_u < cfg.gain_cut[1]) {
        pick = 1;
    } else if (gain_u < cfg.gain_cut[2]) {
        pick = 2;
    }
    if (cfg.gain_tally != nullptr) ++cfg.gain_tally[pick];
    const double loss = eval_loss(cfg, r2);
    return (cfg.gain_value[pick] * g) * loss;
}

}  // namespace detail

// Both kernels require 1 <= n_bs < 2^30 (block ids are 32-bit).
TrialAggregate run_trial_scalar(const KernelConfig& cfg, uint32_t n_bs);
TrialAggregate run_trial_avx2(const KernelConfig& cfg, uint32_t n_bs);

enum class KernelKind { auto_detect, scalar, avx2 };

using KernelFn = TrialAggregate (*)(const KernelConfig&, uint32_t);

// auto_detect honors the UDN_MC_KERNEL environment variable ("scalar" or
// "avx2") and otherwise picks AVX2 when the CPU supports it. Requesting an
// unavailable kernel throws PreconditionError.
KernelFn select_kernel(KernelKind kind);
bool kernel_available(KernelKind kind) noexcept;
const char* kernel_name(KernelFn fn) noexcept;

// Test hooks: run the vector transcendentals on n (multiple of 4) inputs.
// Throw PreconditionError when the AVX2 kernel is unavailable.
void pm_log_batch_avx2(const double* in, double* out, std::size_t n);
void pm_exp_batch_avx2(const double* in, double* out, std::size_t n);

}  // namespace udn::mc
