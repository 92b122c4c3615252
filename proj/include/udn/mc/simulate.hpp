#pragma once

#include <array>
#include <cstdint>

#include "udn/mc/kernel.hpp"
#include "udn/network_model.hpp"

// Monte Carlo ground truth for the analytic engine: base stations form a
// Poisson process on a disc around the typical user, the nearest one serves
// with aligned beams, the rest interfere through the sectored gain
// distribution, Rayleigh fading and the dual-slope loss. The mean
// interference of the field beyond the disc (Campbell's formula) is added to
// the noise term, so finite windows stay unbiased; the neglected tail
// fluctuations shrink like R^(2 - 2 beta2). Shares nothing with the analytic
// code beyond the network-model definitions.

namespace udn::mc {

struct SimConfig {
    uint64_t trials = 10000;
    uint64_t seed = 0x8e51f2a64d33c871ull;
    double window_radius = 0.0;        // simulation disc radius, meters
    double min_guard_multiplier = 5.0; // window must exceed this multiple of (lambda*pi)^{-1/2}

    // Default-window construction: picks window_radius via
    // default_window_radius and validates.
    static SimConfig make(const NetworkParams& params, uint64_t trials, uint64_t seed);

    // Checks trials >= 1 and both window rules (guard multiple and the
    // truncation bound below); names the violated rule and the minimum
    // admissible radius.
    void validate(const NetworkParams& params) const;
};

// max(20 d0, guard * (lambda pi)^{-1/2}, truncation_min_radius).
double default_window_radius(const NetworkParams& params, double guard_multiplier);

// Smallest radius R with mean interference from beyond R at most 1e-3 of the
// mean total (Campbell's formula; gain and fading factors cancel). The mean
// total is infinite for beta1 >= 2, where any R >= d0 qualifies.
double truncation_min_radius(const DualSlopeModel& model);

struct SinrSample {
    // the far-field floor keeps this finite; the +inf sentinel path survives
    // only as a guard against degenerate future loss models
    double sinr = 0.0;
    double serving_distance = 0.0;
    uint64_t n_interferers = 0;
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    uint64_t trials = 0;
    uint64_t seed = 0;
};

struct PairEstimate {
    Estimate coverage;
    Estimate ase;
    uint64_t sentinel_count = 0;   // infinite-SINR trials, excluded from the ASE mean
    uint64_t redraw_count = 0;     // empty-window redraws across all trials
    bool sentinel_warning = false; // sentinel_count exceeded 0.1% of trials
};

// One network realization, deterministic in (seed, trial_index).
SinrSample sample_snapshot(const NetworkParams& params, const SimConfig& config,
                           uint64_t trial_index, KernelKind kind = KernelKind::auto_detect);

// P[SINR > T] with binomial std_error. Sentinel trials count as covered.
Estimate estimate_coverage(const NetworkParams& params, const SimConfig& config,
                           KernelKind kind = KernelKind::auto_detect, unsigned workers = 1);

// Mean of lambda log2(1+SINR) 1{SINR >= T} with its std_error.
Estimate estimate_ase(const NetworkParams& params, const SimConfig& config,
                      KernelKind kind = KernelKind::auto_detect, unsigned workers = 1);

// Both estimates from one shared sample stream, plus the bookkeeping counts.
PairEstimate estimate_pair(const NetworkParams& params, const SimConfig& config,
                           KernelKind kind = KernelKind::auto_detect, unsigned workers = 1);

struct TruncationProbe {
    Estimate base;     // coverage at window_radius
    Estimate doubled;  // coverage at 2x window_radius, coupled by superposition
};

// Re-estimates coverage with the window doubled by adding an independent
// annulus population to the same base realizations (common random numbers),
// so the difference isolates the truncation effect.
TruncationProbe truncation_probe(const NetworkParams& params, const SimConfig& config,
                                 KernelKind kind = KernelKind::auto_detect, unsigned workers = 1);

// Interferer beam-pick frequencies (aligned, bs-main, ue-main, both-side)
// over all trials; runs on the scalar kernel.
std::array<uint64_t, 4> gain_frequencies(const NetworkParams& params, const SimConfig& config);

}  // namespace udn::mc
