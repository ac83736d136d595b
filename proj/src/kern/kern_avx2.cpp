// SPDX-License-Identifier: Apache-2.0

// AVX2 instantiation of the lane kernels. Compiled with -mavx2 (no FMA, so
// rounding matches the scalar reference); callers must gate on detected_simd.
// Lane counts that do not fill a vector are peeled onto the scalar kernels.

#include "tiplab/kern/kernels.hpp"

#if defined(TIPLAB_AVX2_TU) && defined(__AVX2__)

#include "tiplab/kern/kernels_impl.hpp"

#include <cmath>

namespace tiplab::kern {

void fill_normals_block_avx2(std::uint64_t master_seed, std::uint64_t stream0,
                             int nlanes, long step0, int nsteps, double* out) {
    const int main = nlanes & ~(lane_avx2::width - 1);
    fill_normals_block_impl<lane_avx2>(master_seed, stream0, 0, main, nlanes,
                                       step0, nsteps, out);
    fill_normals_block_impl<lane_scalar>(master_seed, stream0, main, nlanes,
                                         nlanes, step0, nsteps, out);
}

void em_advance_avx2(const EmChunkArgs& a) {
    const int main = a.nlanes & ~(lane_avx2::width - 1);
    EmChunkArgsView v{a.x,  a.first_cross, a.guard_step, a.nlanes, 0,
                      main, a.y,           a.thr,        a.z,      a.n0,
                      a.nsteps, a.dt,      a.sig_sqrt_dt, a.guard_x,
                      a.snap,  a.snap_every};
    em_advance_impl<lane_avx2>(v);
    if (main < a.nlanes) {
        v.lane_begin = main;
        v.lane_end = a.nlanes;
        em_advance_impl<lane_scalar>(v);
    }
}

void kde_eval_avx2(const double* grid, int ngrid, const double* samples,
                   int nsamples, double bandwidth, double* out) {
    const double norm =
        1.0 / (nsamples * bandwidth * std::sqrt(6.283185307179586476925287));
    const int main = ngrid & ~(lane_avx2::width - 1);
    kde_eval_impl<lane_avx2>(grid, 0, main, samples, nsamples, bandwidth, norm,
                             out);
    if (main < ngrid) {
        kde_eval_impl<lane_scalar>(grid, main, ngrid, samples, nsamples,
                                   bandwidth, norm, out);
    }
}

} // namespace tiplab::kern

#else // no AVX2 in this build: forward to the reference kernels

namespace tiplab::kern {

void fill_normals_block_avx2(std::uint64_t master_seed, std::uint64_t stream0,
                             int nlanes, long step0, int nsteps, double* out) {
    fill_normals_block_scalar(master_seed, stream0, nlanes, step0, nsteps, out);
}

void em_advance_avx2(const EmChunkArgs& a) { em_advance_scalar(a); }

void kde_eval_avx2(const double* grid, int ngrid, const double* samples,
                   int nsamples, double bandwidth, double* out) {
    kde_eval_scalar(grid, ngrid, samples, nsamples, bandwidth, out);
}

} // namespace tiplab::kern

#endif
