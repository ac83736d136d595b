// SPDX-License-Identifier: Apache-2.0
#pragma once

// Public entry points for the hot kernels. Each has a scalar reference and
// an AVX2 variant; the unsuffixed name dispatches on the detected CPU (or on
// the TIPLAB_SIMD=scalar|avx2 override). Scalar and AVX2 results are bitwise
// identical by construction, so dispatch never changes numbers, only speed.

#include <cstdint>

namespace tiplab::kern {

enum class SimdLevel { scalar, avx2 };

/// What the CPU supports (and the build provides).
SimdLevel detected_simd();
/// Level used by the dispatched entry points.
SimdLevel active_simd();
/// Test hook: pin the level. reset_simd() returns to auto detection.
void force_simd(SimdLevel);
void reset_simd();

// --- Gaussian noise -------------------------------------------------------
// Standard normals for lanes stream0..stream0+nlanes-1 over absolute steps
// [step0, step0+nsteps), written step-major: out[s*nlanes + lane]. Stream
// `id` step `n` always receives the same draw regardless of blocking.

void fill_normals_block(std::uint64_t master_seed, std::uint64_t stream0,
                        int nlanes, long step0, int nsteps, double* out);
void fill_normals_block_scalar(std::uint64_t master_seed, std::uint64_t stream0,
                               int nlanes, long step0, int nsteps, double* out);
void fill_normals_block_avx2(std::uint64_t master_seed, std::uint64_t stream0,
                             int nlanes, long step0, int nsteps, double* out);

/// Single-stream convenience wrapper.
void fill_normals(std::uint64_t master_seed, std::uint64_t stream, long step0,
                  int n, double* out);

// --- Euler-Maruyama block advance ------------------------------------------
// x_{n+1} = x_n + ((x_n + y_n)^2 - 1) dt + sig_sqrt_dt * z_n per lane, with
// first-crossing capture against thr and a sticky divergence guard that
// freezes a lane once x exceeds guard_x.

struct EmChunkArgs {
    double* x = nullptr;           ///< [nlanes] lane states, in/out
    double* first_cross = nullptr; ///< [nlanes] crossing step as double, -1 = none
    double* guard_step = nullptr;  ///< [nlanes] guard-trip step as double, -1 = none
    int nlanes = 0;
    const double* y = nullptr;   ///< y at absolute step n0+s, s in [0, nsteps)
    const double* thr = nullptr; ///< threshold at absolute step n0+s+1
    const double* z = nullptr;   ///< normals, z[s*nlanes + lane]
    long n0 = 0;
    int nsteps = 0;
    double dt = 0.0;
    double sig_sqrt_dt = 0.0;
    double guard_x = 1e3;
    double* snap = nullptr; ///< optional rows [k][nlanes] at steps n % snap_every == 0
    int snap_every = 0;
};

void em_advance(const EmChunkArgs& a);
void em_advance_scalar(const EmChunkArgs& a);
void em_advance_avx2(const EmChunkArgs& a);

/// Number of snapshot rows em_advance writes for a chunk.
inline int em_snap_rows(long n0, int nsteps, int snap_every) {
    if (snap_every <= 0) return 0;
    const long lo = n0 + 1, hi = n0 + nsteps;
    if (hi < lo) return 0;
    return static_cast<int>(hi / snap_every - (lo - 1) / snap_every);
}

// --- Gaussian KDE ----------------------------------------------------------
// out[g] = 1/(ns*bw*sqrt(2pi)) * sum_s exp(-((grid[g]-samples[s])/bw)^2 / 2)

void kde_eval(const double* grid, int ngrid, const double* samples,
              int nsamples, double bandwidth, double* out);
void kde_eval_scalar(const double* grid, int ngrid, const double* samples,
                     int nsamples, double bandwidth, double* out);
void kde_eval_avx2(const double* grid, int ngrid, const double* samples,
                   int nsamples, double bandwidth, double* out);

/// Density at a single point (same arithmetic as the grid kernels).
double kde_eval_one(double at, const double* samples, int nsamples,
                    double bandwidth);

} // namespace tiplab::kern
