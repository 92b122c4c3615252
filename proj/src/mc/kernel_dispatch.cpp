#include <cstdlib>
#include <cstring>

#include "udn/errors.hpp"
#include "udn/mc/kernel.hpp"

namespace udn::mc {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

}  // namespace

#if !defined(UDN_BUILD_AVX2)

TrialAggregate run_trial_avx2(const KernelConfig&, uint32_t) {
    throw PreconditionError("avx2 kernel not built for this target");
}

void pm_log_batch_avx2(const double*, double*, std::size_t) {
    throw PreconditionError("avx2 kernel not built for this target");
}

void pm_exp_batch_avx2(const double*, double*, std::size_t) {
    throw PreconditionError("avx2 kernel not built for this target");
}

#endif

bool kernel_available(KernelKind kind) noexcept {
    if (kind == KernelKind::avx2) {
#if defined(UDN_BUILD_AVX2)
        return cpu_has_avx2();
#else
        return false;
#endif
    }
    return true;
}

KernelFn select_kernel(KernelKind kind) {
    if (kind == KernelKind::auto_detect) {
        if (const char* env = std::getenv("UDN_MC_KERNEL")) {
            if (std::strcmp(env, "scalar") == 0) {
                kind = KernelKind::scalar;
            } else if (std::strcmp(env, "avx2") == 0) {
                kind = KernelKind::avx2;
            } else if (std::strcmp(env, "auto") != 0) {
                throw PreconditionError("UDN_MC_KERNEL must be one of scalar, avx2, auto");
            }
        }
        if (kind == KernelKind::auto_detect) {
            kind = kernel_available(KernelKind::avx2) ? KernelKind::avx2 : KernelKind::scalar;
        }
    }
    if (kind == KernelKind::scalar) return run_trial_scalar;
    if (!kernel_available(KernelKind::avx2)) {
        throw PreconditionError("avx2 kernel unavailable on this host");
    }
    return run_trial_avx2;
}

const char* kernel_name(KernelFn fn) noexcept {
    return fn == run_trial_scalar ? "scalar" : "avx2";
}

}  // namespace udn::mc
