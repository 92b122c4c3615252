#include <limits>
#include <vector>

#include "udn/errors.hpp"
#include "udn/mc/kernel.hpp"

namespace udn::mc {

namespace {

struct Scratch {
    std::vector<double> r2;
    std::vector<double> gain_u;
};

Scratch& scratch(uint32_t n) {
    thread_local Scratch s;
    if (s.r2.size() < n) {
        s.r2.resize(n);
        s.gain_u.resize(n);
    }
    return s;
}

}  // namespace

TrialAggregate run_trial_scalar(const KernelConfig& cfg, uint32_t n_bs) {
    if (n_bs == 0 || n_bs >= (1u << 30)) {
        throw PreconditionError("run_trial_scalar: n_bs must be in [1, 2^30)");
    }
    const auto trial_lo = static_cast<uint32_t>(cfg.trial);
    const auto trial_hi = static_cast<uint32_t>(cfg.trial >> 32);
    Scratch& buf = scratch(n_bs);

    double best = std::numeric_limits<double>::infinity();
    uint32_t best_i = 0;
    for (uint32_t i = 0; i < n_bs; ++i) {
        const detail::Pass1Value v = detail::pass1_draw(cfg, trial_lo, trial_hi, i);
        buf.r2[i] = v.r2;
        buf.gain_u[i] = v.gain_u;
        if (v.r2 < best) {
            best = v.r2;
            best_i = i;
        }
    }

    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (uint32_t i = 0; i < n_bs; ++i) {
        if (cfg.exclude_nearest && i == best_i) continue;
        acc[i & 3] += detail::pass2_term(cfg, trial_lo, trial_hi, i, buf.r2[i], buf.gain_u[i]);
    }
    return {(acc[0] + acc[1]) + (acc[2] + acc[3]), best, best_i};
}

}  // namespace udn::mc
