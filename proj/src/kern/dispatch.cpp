// SPDX-License-Identifier: Apache-2.0

#include "tiplab/kern/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace tiplab::kern {

namespace {

SimdLevel detect() {
#if defined(TIPLAB_AVX2_TU) && defined(__x86_64__)
    if (__builtin_cpu_supports("avx2")) return SimdLevel::avx2;
#endif
    return SimdLevel::scalar;
}

SimdLevel env_or_detected() {
    const char* env = std::getenv("TIPLAB_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return SimdLevel::scalar;
        if (std::strcmp(env, "avx2") == 0 && detect() == SimdLevel::avx2)
            return SimdLevel::avx2;
    }
    return detect();
}

std::atomic<int> g_forced{-1};

} // namespace

SimdLevel detected_simd() {
    static const SimdLevel level = detect();
    return level;
}

SimdLevel active_simd() {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return static_cast<SimdLevel>(forced);
    static const SimdLevel level = env_or_detected();
    return level;
}

void force_simd(SimdLevel level) {
    if (level == SimdLevel::avx2 && detected_simd() != SimdLevel::avx2)
        level = SimdLevel::scalar;
    g_forced.store(static_cast<int>(level), std::memory_order_relaxed);
}

void reset_simd() { g_forced.store(-1, std::memory_order_relaxed); }

void fill_normals_block(std::uint64_t master_seed, std::uint64_t stream0,
                        int nlanes, long step0, int nsteps, double* out) {
    if (active_simd() == SimdLevel::avx2)
        fill_normals_block_avx2(master_seed, stream0, nlanes, step0, nsteps, out);
    else
        fill_normals_block_scalar(master_seed, stream0, nlanes, step0, nsteps, out);
}

void em_advance(const EmChunkArgs& a) {
    if (active_simd() == SimdLevel::avx2)
        em_advance_avx2(a);
    else
        em_advance_scalar(a);
}

void kde_eval(const double* grid, int ngrid, const double* samples,
              int nsamples, double bandwidth, double* out) {
    if (active_simd() == SimdLevel::avx2)
        kde_eval_avx2(grid, ngrid, samples, nsamples, bandwidth, out);
    else
        kde_eval_scalar(grid, ngrid, samples, nsamples, bandwidth, out);
}

} // namespace tiplab::kern
