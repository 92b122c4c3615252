#include "udn/mc/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "udn/errors.hpp"
#include "udn/mc/philox.hpp"
#include "udn/mc/poisson.hpp"

namespace udn::mc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTruncationTarget = 1e-3;
constexpr uint64_t kChunk = 1024;  // reduction granularity, fixed for determinism
constexpr uint32_t kMaxRedraws = 4096;
constexpr uint64_t kKernelCountLimit = uint64_t{1} << 30;

SlopeEval classify_slope(double beta, double amplitude) {
    SlopeEval ev;
    ev.amplitude = amplitude;
    if (beta == 0.0) {
        ev.kind = LossKind::constant;
        return ev;
    }
    const double twice = 2.0 * beta;
    const auto k = static_cast<int>(std::llround(twice));
    if (k >= 1 && k <= 8 && static_cast<double>(k) == twice) {
        ev.kind = LossKind::half_power;
        ev.twice_exponent = k;
    } else {
        ev.kind = LossKind::general;
        ev.neg_half_exponent = -0.5 * beta;
    }
    return ev;
}

struct RunContext {
    KernelConfig base;
    PoissonSampler count;
    PoissonSampler annulus_count;
    KernelFn kernel = nullptr;
    double denom_base = 0.0;     // sigma2 plus the mean far field beyond R
    double denom_doubled = 0.0;  // sigma2 plus the mean far field beyond 2R
    double nn_gain = 1.0;
    double threshold = 1.0;
    double lambda = 0.0;
};

RunContext make_context(const NetworkParams& params, const SimConfig& config, KernelKind kind) {
    config.validate(params);
    RunContext ctx;
    ctx.kernel = select_kernel(kind);
    const double r = config.window_radius;
    KernelConfig& k = ctx.base;
    k.key = {static_cast<uint32_t>(config.seed), static_cast<uint32_t>(config.seed >> 32)};
    k.r2_scale = r * r;
    k.r2_offset = 0.0;
    k.d0_sq = params.model.d0 * params.model.d0;
    k.near_eval = classify_slope(params.model.beta1, params.model.alpha0);
    k.far_eval = classify_slope(
        params.model.beta2,
        params.model.alpha0 * std::pow(params.model.d0, params.model.beta2 - params.model.beta1));
    const GainDistribution dist = gain_distribution(params.beams);
    for (int i = 0; i < 4; ++i) k.gain_value[i] = dist.gains[static_cast<size_t>(i)];
    k.gain_cut[0] = dist.probs[0];
    k.gain_cut[1] = dist.probs[0] + dist.probs[1];
    k.gain_cut[2] = k.gain_cut[1] + dist.probs[2];
    k.neg_fading_scale = -1.0 / params.mu;
    ctx.count.init(params.lambda * kPi * r * r);
    ctx.annulus_count.init(3.0 * params.lambda * kPi * r * r);
    // Campbell mean of the interference field beyond the window, folded into
    // the denominator so the finite window stays unbiased. The far branch
    // alone applies because validate() pins window_radius >= d0, and the
    // truncated tail's variance falls off like R^(2 - 2 beta2), negligible
    // against the in-window part.
    const double far2 = params.model.beta2 - 2.0;
    const double far_coeff =
        params.model.alpha0 *
        std::pow(params.model.d0, params.model.beta2 - params.model.beta1);
    const double tail_rate =
        2.0 * kPi * params.lambda * expected_gain(dist) * far_coeff / (params.mu * far2);
    ctx.denom_base = params.sigma2 + tail_rate * std::pow(r, -far2);
    ctx.denom_doubled = params.sigma2 + tail_rate * std::pow(2.0 * r, -far2);
    ctx.nn_gain = params.beams.main_bs * params.beams.main_ue;
    ctx.threshold = params.threshold;
    ctx.lambda = params.lambda;
    return ctx;
}

struct TrialOutcome {
    double sinr = 0.0;
    double serving_r2 = 0.0;
    uint64_t n_bs = 0;
    uint32_t attempt = 0;
    double numer = 0.0;
    double interference = 0.0;
};

TrialOutcome run_one_trial(const RunContext& ctx, uint64_t trial) {
    const auto tlo = static_cast<uint32_t>(trial);
    const auto thi = static_cast<uint32_t>(trial >> 32);
    for (uint32_t attempt = 0; attempt < kMaxRedraws; ++attempt) {
        const uint32_t bs_stream = 4 * attempt;
        const uint32_t trial_stream = 4 * attempt + 1;
        const PhiloxOut tdraw = philox_block(ctx.base.key, 0, tlo, thi, trial_stream);
        const double h = pm::log(canonical_double(tdraw.u64_first())) * ctx.base.neg_fading_scale;
        UniformCursor cur{ctx.base.key, tlo, thi, trial_stream, 1};
        const uint64_t n = ctx.count.draw(cur);
        if (n == 0) continue;
        if (n >= kKernelCountLimit) {
            throw PreconditionError(
                "simulate: base station count exceeds the kernel limit; shrink the window or "
                "density");
        }
        KernelConfig cfg = ctx.base;
        cfg.trial = trial;
        cfg.stream = bs_stream;
        const TrialAggregate agg = ctx.kernel(cfg, static_cast<uint32_t>(n));
        const double loss = detail::eval_loss(cfg, agg.serving_r2);
        const double numer = (ctx.nn_gain * h) * loss;
        TrialOutcome out;
        // numer == 0 only on a zero fading draw; define SINR = 0 there so the
        // sample never becomes 0/0
        out.sinr = numer == 0.0 ? 0.0 : numer / (ctx.denom_base + agg.interference);
        out.serving_r2 = agg.serving_r2;
        out.n_bs = n;
        out.attempt = attempt;
        out.numer = numer;
        out.interference = agg.interference;
        return out;
    }
    throw NonConvergenceError("simulate: window repeatedly empty across redraw attempts", 0.0, 0.0);
}

// Coverage indicator at double the window: same realization plus an
// independent annulus population between R and 2R.
double doubled_window_sinr(const RunContext& ctx, uint64_t trial, const TrialOutcome& base) {
    const auto tlo = static_cast<uint32_t>(trial);
    const auto thi = static_cast<uint32_t>(trial >> 32);
    UniformCursor cur{ctx.base.key, tlo, thi, 4 * base.attempt + 3, 0};
    const uint64_t na = ctx.annulus_count.draw(cur);
    double total = base.interference;
    if (na > 0) {
        if (na >= kKernelCountLimit) {
            throw PreconditionError("simulate: annulus count exceeds the kernel limit");
        }
        KernelConfig cfg = ctx.base;
        cfg.trial = trial;
        cfg.stream = 4 * base.attempt + 2;
        cfg.exclude_nearest = false;
        cfg.r2_offset = ctx.base.r2_scale;       // R^2
        cfg.r2_scale = 3.0 * ctx.base.r2_scale;  // spans (R^2, 4R^2]
        total = base.interference + ctx.kernel(cfg, static_cast<uint32_t>(na)).interference;
    }
    return base.numer == 0.0 ? 0.0 : base.numer / (ctx.denom_doubled + total);
}

struct ChunkStats {
    uint64_t covered = 0;
    uint64_t covered_doubled = 0;
    uint64_t included = 0;
    uint64_t sentinels = 0;
    uint64_t redraws = 0;
    double val_sum = 0.0;
    double val_sumsq = 0.0;
};

enum class RunMode { pair, probe };

void process_chunk(const RunContext& ctx, RunMode mode, uint64_t t0, uint64_t t1,
                   ChunkStats& out) {
    for (uint64_t t = t0; t < t1; ++t) {
        const TrialOutcome o = run_one_trial(ctx, t);
        out.redraws += o.attempt;
        if (o.sinr > ctx.threshold) ++out.covered;
        if (std::isfinite(o.sinr)) {
            ++out.included;
            const double v = o.sinr >= ctx.threshold ? std::log2(1.0 + o.sinr) : 0.0;
            out.val_sum += v;
            out.val_sumsq += v * v;
        } else {
            ++out.sentinels;
        }
        if (mode == RunMode::probe && doubled_window_sinr(ctx, t, o) > ctx.threshold) {
            ++out.covered_doubled;
        }
    }
}

ChunkStats run_all(const RunContext& ctx, RunMode mode, uint64_t trials, unsigned workers) {
    const uint64_t nchunks = (trials + kChunk - 1) / kChunk;
    std::vector<ChunkStats> parts(nchunks);
    auto work = [&](uint64_t c) {
        process_chunk(ctx, mode, c * kChunk, std::min(trials, (c + 1) * kChunk), parts[c]);
    };
    if (workers <= 1 || nchunks == 1) {
        for (uint64_t c = 0; c < nchunks; ++c) work(c);
    } else {
        std::atomic<uint64_t> next{0};
        const auto n_threads =
            static_cast<unsigned>(std::min<uint64_t>(workers, nchunks));
        std::vector<std::exception_ptr> errors(n_threads);
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (;;) {
                        const uint64_t c = next.fetch_add(1);
                        if (c >= nchunks) return;
                        work(c);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }
    ChunkStats total;  // fixed chunk order keeps the fold worker-count independent
    for (const ChunkStats& p : parts) {
        total.covered += p.covered;
        total.covered_doubled += p.covered_doubled;
        total.included += p.included;
        total.sentinels += p.sentinels;
        total.redraws += p.redraws;
        total.val_sum += p.val_sum;
        total.val_sumsq += p.val_sumsq;
    }
    return total;
}

Estimate binomial_estimate(uint64_t hits, const SimConfig& config) {
    const auto n = static_cast<double>(config.trials);
    const double mean = static_cast<double>(hits) / n;
    Estimate e;
    e.mean = mean;
    e.std_error = std::sqrt(std::max(0.0, mean * (1.0 - mean) / n));
    e.trials = config.trials;
    e.seed = config.seed;
    return e;
}

Estimate ase_estimate(const ChunkStats& s, const RunContext& ctx, const SimConfig& config) {
    Estimate e;
    e.trials = config.trials;
    e.seed = config.seed;
    if (s.included == 0) return e;
    const auto n = static_cast<double>(s.included);
    e.mean = ctx.lambda * (s.val_sum / n);
    if (s.included > 1) {
        const double var =
            std::max(0.0, (s.val_sumsq - s.val_sum * (s.val_sum / n)) / (n - 1.0));
        e.std_error = ctx.lambda * std::sqrt(var / n);
    }
    return e;
}

}  // namespace

double truncation_min_radius(const DualSlopeModel& model) {
    model.validate();
    if (model.beta1 >= 2.0) return model.d0;  // mean total interference diverges
    const double total = 2.0 * kPi * gamma_moment(model);
    const double tail_coeff = 2.0 * kPi * model.alpha0 *
                              std::pow(model.d0, model.beta2 - model.beta1) /
                              (model.beta2 - 2.0);
    const double r =
        std::pow(tail_coeff / (kTruncationTarget * total), 1.0 / (model.beta2 - 2.0));
    return std::max(r, model.d0);
}

double default_window_radius(const NetworkParams& params, double guard_multiplier) {
    params.validate();
    // same expression as the validate() guard, so the rounding agrees bitwise
    const double guard = guard_multiplier / std::sqrt(params.lambda * kPi);
    return std::max({20.0 * params.model.d0, guard, truncation_min_radius(params.model)});
}

SimConfig SimConfig::make(const NetworkParams& params, uint64_t trials, uint64_t seed) {
    SimConfig c;
    c.trials = trials;
    c.seed = seed;
    c.window_radius = default_window_radius(params, c.min_guard_multiplier);
    c.validate(params);
    return c;
}

void SimConfig::validate(const NetworkParams& params) const {
    params.validate();
    if (trials < 1) throw PreconditionError("SimConfig: trials must be >= 1");
    if (!(std::isfinite(min_guard_multiplier) && min_guard_multiplier >= 1.0)) {
        throw PreconditionError("SimConfig: min_guard_multiplier must be >= 1");
    }
    if (!(std::isfinite(window_radius) && window_radius > 0.0)) {
        throw PreconditionError("SimConfig: window_radius must be positive");
    }
    if (window_radius < params.model.d0) {
        throw PreconditionError("SimConfig: window_radius must be at least d0");
    }
    const double guard_min = min_guard_multiplier / std::sqrt(params.lambda * kPi);
    if (window_radius < guard_min) {
        throw PreconditionError(
            "SimConfig: window_radius below the nearest-neighbor guard, need at least " +
            std::to_string(guard_min) + " m");
    }
    const double trunc_min = truncation_min_radius(params.model);
    if (window_radius < trunc_min) {
        throw PreconditionError(
            "SimConfig: window_radius fails the far-field truncation bound, need at least " +
            std::to_string(trunc_min) + " m");
    }
}

SinrSample sample_snapshot(const NetworkParams& params, const SimConfig& config,
                           uint64_t trial_index, KernelKind kind) {
    const RunContext ctx = make_context(params, config, kind);
    const TrialOutcome o = run_one_trial(ctx, trial_index);
    return {o.sinr, std::sqrt(o.serving_r2), o.n_bs - 1};
}

Estimate estimate_coverage(const NetworkParams& params, const SimConfig& config, KernelKind kind,
                           unsigned workers) {
    return estimate_pair(params, config, kind, workers).coverage;
}

Estimate estimate_ase(const NetworkParams& params, const SimConfig& config, KernelKind kind,
                      unsigned workers) {
    return estimate_pair(params, config, kind, workers).ase;
}

PairEstimate estimate_pair(const NetworkParams& params, const SimConfig& config, KernelKind kind,
                           unsigned workers) {
    const RunContext ctx = make_context(params, config, kind);
    const ChunkStats s = run_all(ctx, RunMode::pair, config.trials, workers);
    PairEstimate out;
    out.coverage = binomial_estimate(s.covered, config);
    out.ase = ase_estimate(s, ctx, config);
    out.sentinel_count = s.sentinels;
    out.redraw_count = s.redraws;
    out.sentinel_warning =
        static_cast<double>(s.sentinels) > 0.001 * static_cast<double>(config.trials);
    return out;
}

TruncationProbe truncation_probe(const NetworkParams& params, const SimConfig& config,
                                 KernelKind kind, unsigned workers) {
    const RunContext ctx = make_context(params, config, kind);
    const ChunkStats s = run_all(ctx, RunMode::probe, config.trials, workers);
    return {binomial_estimate(s.covered, config), binomial_estimate(s.covered_doubled, config)};
}

std::array<uint64_t, 4> gain_frequencies(const NetworkParams& params, const SimConfig& config) {
    RunContext ctx = make_context(params, config, KernelKind::scalar);
    std::array<uint64_t, 4> tally{0, 0, 0, 0};
    ctx.base.gain_tally = tally.data();
    for (uint64_t t = 0; t < config.trials; ++t) run_one_trial(ctx, t);
    return tally;
}

}  // namespace udn::mc
