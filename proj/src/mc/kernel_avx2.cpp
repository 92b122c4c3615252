#include <immintrin.h>

#include <cstdint>
#include <limits>
#include <vector>

#include "udn/errors.hpp"
#include "udn/mc/kernel.hpp"

// Mirrors kernel_scalar.cpp operation for operation: every floating step is
// the same correctly rounded op (or the same fma) the scalar path performs,
// so the two kernels agree bitwise. Layout: gangs of 8 philox blocks,
// transposed so each __m256i holds one counter word across 8 blocks.

namespace udn::mc {

namespace {

struct Phil8 {
    __m256i w0, w1, w2, w3;
};

inline Phil8 philox8(PhiloxKey key, __m256i blocks, uint32_t trial_lo, uint32_t trial_hi,
                     uint32_t stream) {
    __m256i x0 = blocks;
    __m256i x1 = _mm256_set1_epi32(static_cast<int>(trial_lo));
    __m256i x2 = _mm256_set1_epi32(static_cast<int>(trial_hi));
    __m256i x3 = _mm256_set1_epi32(static_cast<int>(stream));
    __m256i k0 = _mm256_set1_epi32(static_cast<int>(key.k0));
    __m256i k1 = _mm256_set1_epi32(static_cast<int>(key.k1));
    const __m256i m0 = _mm256_set1_epi32(static_cast<int>(kPhiloxM0));
    const __m256i m1 = _mm256_set1_epi32(static_cast<int>(kPhiloxM1));
    const __m256i w0 = _mm256_set1_epi32(static_cast<int>(kPhiloxW0));
    const __m256i w1 = _mm256_set1_epi32(static_cast<int>(kPhiloxW1));
    for (int round = 0; round < 10; ++round) {
        const __m256i even0 = _mm256_mul_epu32(x0, m0);
        const __m256i odd0 = _mm256_mul_epu32(_mm256_srli_epi64(x0, 32), m0);
        const __m256i lo0 = _mm256_blend_epi32(even0, _mm256_slli_epi64(odd0, 32), 0xAA);
        const __m256i hi0 = _mm256_blend_epi32(_mm256_srli_epi64(even0, 32), odd0, 0xAA);
        const __m256i even1 = _mm256_mul_epu32(x2, m1);
        const __m256i odd1 = _mm256_mul_epu32(_mm256_srli_epi64(x2, 32), m1);
        const __m256i lo1 = _mm256_blend_epi32(even1, _mm256_slli_epi64(odd1, 32), 0xAA);
        const __m256i hi1 = _mm256_blend_epi32(_mm256_srli_epi64(even1, 32), odd1, 0xAA);
        x0 = _mm256_xor_si256(_mm256_xor_si256(hi1, x1), k0);
        x1 = lo1;
        x2 = _mm256_xor_si256(_mm256_xor_si256(hi0, x3), k1);
        x3 = lo0;
        k0 = _mm256_add_epi32(k0, w0);
        k1 = _mm256_add_epi32(k1, w1);
    }
    return {x0, x1, x2, x3};
}

inline __m256d canon4(__m256i u64s) {
    const __m256i sh = _mm256_srli_epi64(u64s, 12);
    const __m256i with_exp = _mm256_or_si256(sh, _mm256_set1_epi64x(0x4330000000000000LL));
    const __m256d d = _mm256_sub_pd(_mm256_castsi256_pd(with_exp), _mm256_set1_pd(pm::kTwo52));
    return _mm256_mul_pd(_mm256_add_pd(d, _mm256_set1_pd(1.0)), _mm256_set1_pd(0x1p-52));
}

struct Canon2 {
    __m256d lo;  // blocks 0..3 of the gang
    __m256d hi;  // blocks 4..7
};

// Assembles per-block u64 = wa | wb<<32 and maps to (0,1].
inline Canon2 canonical_pair(__m256i wa, __m256i wb) {
    const __m256i a = _mm256_unpacklo_epi32(wa, wb);  // blocks 0,1 | 4,5
    const __m256i b = _mm256_unpackhi_epi32(wa, wb);  // blocks 2,3 | 6,7
    const __m256i q03 = _mm256_permute2x128_si256(a, b, 0x20);
    const __m256i q47 = _mm256_permute2x128_si256(a, b, 0x31);
    return {canon4(q03), canon4(q47)};
}

inline __m256d pm_log4(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i e_bits = _mm256_srli_epi64(bits, 52);
    const __m256i e_or = _mm256_or_si256(e_bits, _mm256_set1_epi64x(0x4330000000000000LL));
    const __m256d raw_exp = _mm256_sub_pd(_mm256_castsi256_pd(e_or), _mm256_set1_pd(pm::kTwo52));
    const __m256i mant =
        _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                        _mm256_set1_epi64x(0x3FF0000000000000LL));
    __m256d m = _mm256_castsi256_pd(mant);
    __m256d e = _mm256_sub_pd(raw_exp, _mm256_set1_pd(1023.0));
    const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(pm::kSqrtTwo), _CMP_GE_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(_mm256_set1_pd(0.5), m), big);
    e = _mm256_blendv_pd(e, _mm256_add_pd(e, _mm256_set1_pd(1.0)), big);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d r = _mm256_mul_pd(s, s);
    __m256d p = _mm256_set1_pd(1.0 / 21.0);
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 19.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 17.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 15.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 13.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 11.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 9.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 7.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 5.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 3.0));
    const __m256d sr = _mm256_mul_pd(s, r);
    const __m256d lnm = _mm256_fmadd_pd(_mm256_add_pd(sr, sr), p, _mm256_add_pd(s, s));
    return _mm256_fmadd_pd(e, _mm256_set1_pd(pm::kLn2Hi),
                           _mm256_fmadd_pd(e, _mm256_set1_pd(pm::kLn2Lo), lnm));
}

inline __m256d pm_exp4(__m256d x) {
    const __m256d kd =
        _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(pm::kLog2E)),
                        _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fmadd_pd(kd, _mm256_set1_pd(-pm::kLn2Hi), x);
    r = _mm256_fmadd_pd(kd, _mm256_set1_pd(-pm::kLn2Lo), r);
    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(r, p, _mm256_set1_pd(1.0));
    const __m256d magic = _mm256_set1_pd(0x1.8p52);
    const __m256i k = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(kd, magic)),
                                       _mm256_castpd_si256(magic));
    const __m256i expo = _mm256_slli_epi64(_mm256_add_epi64(k, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(expo));
}

inline __m256d eval_slope4(const SlopeEval& ev, __m256d r2) {
    switch (ev.kind) {
        case LossKind::constant:
            return _mm256_set1_pd(ev.amplitude);
        case LossKind::half_power: {
            __m256d p;
            switch (ev.twice_exponent) {
                case 2:
                    p = _mm256_sqrt_pd(r2);
                    break;
                case 4:
                    p = r2;
                    break;
                case 6:
                    p = _mm256_mul_pd(r2, _mm256_sqrt_pd(r2));
                    break;
                case 8:
                    p = _mm256_mul_pd(r2, r2);
                    break;
                case 1:
                    p = _mm256_sqrt_pd(_mm256_sqrt_pd(r2));
                    break;
                case 3: {
                    const __m256d f = _mm256_sqrt_pd(_mm256_sqrt_pd(r2));
                    p = _mm256_mul_pd(_mm256_mul_pd(f, f), f);
                    break;
                }
                case 5: {
                    const __m256d f = _mm256_sqrt_pd(_mm256_sqrt_pd(r2));
                    const __m256d f2 = _mm256_mul_pd(f, f);
                    p = _mm256_mul_pd(_mm256_mul_pd(f2, f2), f);
                    break;
                }
                default: {
                    const __m256d f = _mm256_sqrt_pd(_mm256_sqrt_pd(r2));
                    const __m256d f2 = _mm256_mul_pd(f, f);
                    const __m256d f4 = _mm256_mul_pd(f2, f2);
                    p = _mm256_mul_pd(_mm256_mul_pd(f4, f2), f);
                    break;
                }
            }
            return _mm256_div_pd(_mm256_set1_pd(ev.amplitude), p);
        }
        default: {
            const __m256d t = pm_log4(r2);
            return _mm256_mul_pd(_mm256_set1_pd(ev.amplitude),
                                 pm_exp4(_mm256_mul_pd(t, _mm256_set1_pd(ev.neg_half_exponent))));
        }
    }
}

inline __m256d eval_loss4(const KernelConfig& cfg, __m256d r2) {
    const __m256d near_v = eval_slope4(cfg.near_eval, r2);
    const __m256d far_v = eval_slope4(cfg.far_eval, r2);
    const __m256d is_near = _mm256_cmp_pd(r2, _mm256_set1_pd(cfg.d0_sq), _CMP_LT_OQ);
    return _mm256_blendv_pd(far_v, near_v, is_near);
}

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

TrialAggregate run_trial_avx2(const KernelConfig& cfg, uint32_t n_bs) {
    if (n_bs == 0 || n_bs >= (1u << 30)) {
        throw PreconditionError("run_trial_avx2: n_bs must be in [1, 2^30)");
    }
    if (cfg.gain_tally != nullptr) {
        throw PreconditionError("run_trial_avx2: gain_tally requires the scalar kernel");
    }
    const auto trial_lo = static_cast<uint32_t>(cfg.trial);
    const auto trial_hi = static_cast<uint32_t>(cfg.trial >> 32);
    Scratch& buf = scratch(n_bs);
    const uint32_t n8 = n_bs & ~7u;

    const __m256i even_offs = _mm256_setr_epi32(0, 2, 4, 6, 8, 10, 12, 14);
    const __m256d offset = _mm256_set1_pd(cfg.r2_offset);
    const __m256d scale = _mm256_set1_pd(cfg.r2_scale);
    const __m256i lane_idx = _mm256_setr_epi64x(0, 1, 2, 3);

    __m256d best_v = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256i best_i = _mm256_setzero_si256();
    for (uint32_t i0 = 0; i0 < n8; i0 += 8) {
        const __m256i blocks =
            _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(2 * i0)), even_offs);
        const Phil8 ph = philox8(cfg.key, blocks, trial_lo, trial_hi, cfg.stream);
        const Canon2 ur = canonical_pair(ph.w0, ph.w1);
        const Canon2 ug = canonical_pair(ph.w2, ph.w3);
        const __m256d r2_lo = _mm256_add_pd(offset, _mm256_mul_pd(scale, ur.lo));
        const __m256d r2_hi = _mm256_add_pd(offset, _mm256_mul_pd(scale, ur.hi));
        _mm256_storeu_pd(buf.r2.data() + i0, r2_lo);
        _mm256_storeu_pd(buf.r2.data() + i0 + 4, r2_hi);
        _mm256_storeu_pd(buf.gain_u.data() + i0, ug.lo);
        _mm256_storeu_pd(buf.gain_u.data() + i0 + 4, ug.hi);

        const __m256i base = _mm256_set1_epi64x(i0);
        const __m256i idx_lo = _mm256_add_epi64(base, lane_idx);
        const __m256i idx_hi = _mm256_add_epi64(base, _mm256_add_epi64(lane_idx, _mm256_set1_epi64x(4)));
        __m256d lt = _mm256_cmp_pd(r2_lo, best_v, _CMP_LT_OQ);
        best_v = _mm256_blendv_pd(best_v, r2_lo, lt);
        best_i = _mm256_blendv_epi8(best_i, idx_lo, _mm256_castpd_si256(lt));
        lt = _mm256_cmp_pd(r2_hi, best_v, _CMP_LT_OQ);
        best_v = _mm256_blendv_pd(best_v, r2_hi, lt);
        best_i = _mm256_blendv_epi8(best_i, idx_hi, _mm256_castpd_si256(lt));
    }

    double tail_best = std::numeric_limits<double>::infinity();
    uint32_t tail_bi = 0;
    for (uint32_t i = n8; i < n_bs; ++i) {
        const detail::Pass1Value v = detail::pass1_draw(cfg, trial_lo, trial_hi, i);
        buf.r2[i] = v.r2;
        buf.gain_u[i] = v.gain_u;
        if (v.r2 < tail_best) {
            tail_best = v.r2;
            tail_bi = i;
        }
    }

    // Fold the lane minima (then the tail) with value-then-index ordering;
    // this equals the scalar kernel's sequential strict-less argmin.
    double lane_v[4];
    alignas(32) int64_t lane_i[4];
    _mm256_storeu_pd(lane_v, best_v);
    _mm256_store_si256(reinterpret_cast<__m256i*>(lane_i), best_i);
    double best = std::numeric_limits<double>::infinity();
    uint32_t besti = 0;
    if (n8 > 0) {
        best = lane_v[0];
        besti = static_cast<uint32_t>(lane_i[0]);
        for (int lane = 1; lane < 4; ++lane) {
            const auto idx = static_cast<uint32_t>(lane_i[lane]);
            if (lane_v[lane] < best || (lane_v[lane] == best && idx < besti)) {
                best = lane_v[lane];
                besti = idx;
            }
        }
    }
    if (n8 < n_bs && (tail_best < best || (tail_best == best && tail_bi < besti))) {
        best = tail_best;
        besti = tail_bi;
    }

    const uint64_t serving_key = cfg.exclude_nearest ? besti : (uint64_t{1} << 40);
    const __m256i serving = _mm256_set1_epi64x(static_cast<int64_t>(serving_key));
    const __m256d neg_scale = _mm256_set1_pd(cfg.neg_fading_scale);
    const __m256d cut0 = _mm256_set1_pd(cfg.gain_cut[0]);
    const __m256d cut1 = _mm256_set1_pd(cfg.gain_cut[1]);
    const __m256d cut2 = _mm256_set1_pd(cfg.gain_cut[2]);
    const __m256d gv0 = _mm256_set1_pd(cfg.gain_value[0]);
    const __m256d gv1 = _mm256_set1_pd(cfg.gain_value[1]);
    const __m256d gv2 = _mm256_set1_pd(cfg.gain_value[2]);
    const __m256d gv3 = _mm256_set1_pd(cfg.gain_value[3]);

    __m256d acc = _mm256_setzero_pd();
    for (uint32_t i0 = 0; i0 < n8; i0 += 8) {
        const __m256i blocks =
            _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(2 * i0 + 1)), even_offs);
        const Phil8 ph = philox8(cfg.key, blocks, trial_lo, trial_hi, cfg.stream);
        const Canon2 uf = canonical_pair(ph.w0, ph.w1);
        const __m256i base = _mm256_set1_epi64x(i0);

        for (int half = 0; half < 2; ++half) {
            const __m256d u_fad = half == 0 ? uf.lo : uf.hi;
            const uint32_t at = i0 + (half == 0 ? 0u : 4u);
            const __m256d g = _mm256_mul_pd(pm_log4(u_fad), neg_scale);
            const __m256d ug = _mm256_loadu_pd(buf.gain_u.data() + at);
            __m256d gv = gv3;
            gv = _mm256_blendv_pd(gv, gv2, _mm256_cmp_pd(ug, cut2, _CMP_LT_OQ));
            gv = _mm256_blendv_pd(gv, gv1, _mm256_cmp_pd(ug, cut1, _CMP_LT_OQ));
            gv = _mm256_blendv_pd(gv, gv0, _mm256_cmp_pd(ug, cut0, _CMP_LT_OQ));
            const __m256d r2 = _mm256_loadu_pd(buf.r2.data() + at);
            const __m256d loss = eval_loss4(cfg, r2);
            __m256d term = _mm256_mul_pd(_mm256_mul_pd(gv, g), loss);
            const __m256i idx = _mm256_add_epi64(
                base, half == 0 ? lane_idx : _mm256_add_epi64(lane_idx, _mm256_set1_epi64x(4)));
            const __m256i is_serving = _mm256_cmpeq_epi64(idx, serving);
            term = _mm256_andnot_pd(_mm256_castsi256_pd(is_serving), term);
            acc = _mm256_add_pd(acc, term);
        }
    }

    double accs[4];
    _mm256_storeu_pd(accs, acc);
    for (uint32_t i = n8; i < n_bs; ++i) {
        if (cfg.exclude_nearest && i == besti) continue;
        accs[i & 3] += detail::pass2_term(cfg, trial_lo, trial_hi, i, buf.r2[i], buf.gain_u[i]);
    }
    return {(accs[0] + accs[1]) + (accs[2] + accs[3]), best, besti};
}

void pm_log_batch_avx2(const double* in, double* out, std::size_t n) {
    if (n % 4 != 0) throw PreconditionError("pm_log_batch_avx2: n must be a multiple of 4");
    for (std::size_t i = 0; i < n; i += 4) {
        _mm256_storeu_pd(out + i, pm_log4(_mm256_loadu_pd(in + i)));
    }
}

void pm_exp_batch_avx2(const double* in, double* out, std::size_t n) {
    if (n % 4 != 0) throw PreconditionError("pm_exp_batch_avx2: n must be a multiple of 4");
    for (std::size_t i = 0; i < n; i += 4) {
        _mm256_storeu_pd(out + i, pm_exp4(_mm256_loadu_pd(in + i)));
    }
}

}  // namespace udn::mc
