// SPDX-License-Identifier: Apache-2.0

// Scalar reference instantiation of the lane kernels.

#include "tiplab/kern/kernels.hpp"
#include "tiplab/kern/kernels_impl.hpp"

#include <cmath>

namespace tiplab::kern {

void fill_normals_block_scalar(std::uint64_t master_seed, std::uint64_t stream0,
                               int nlanes, long step0, int nsteps, double* out) {
    fill_normals_block_impl<lane_scalar>(master_seed, stream0, 0, nlanes,
                                         nlanes, step0, nsteps, out);
}

void fill_normals(std::uint64_t master_seed, std::uint64_t stream, long step0,
                  int n, double* out) {
    fill_normals_block_scalar(master_seed, stream, 1, step0, n, out);
}

void em_advance_scalar(const EmChunkArgs& a) {
    EmChunkArgsView v{a.x,  a.first_cross, a.guard_step, a.nlanes, 0,
                      a.nlanes, a.y,       a.thr,        a.z,      a.n0,
                      a.nsteps, a.dt,      a.sig_sqrt_dt, a.guard_x,
                      a.snap,  a.snap_every};
    em_advance_impl<lane_scalar>(v);
}

void kde_eval_scalar(const double* grid, int ngrid, const double* samples,
                     int nsamples, double bandwidth, double* out) {
    const double norm =
        1.0 / (nsamples * bandwidth * std::sqrt(6.283185307179586476925287));
    kde_eval_impl<lane_scalar>(grid, 0, ngrid, samples, nsamples, bandwidth,
                               norm, out);
}

double kde_eval_one(double at, const double* samples, int nsamples,
                    double bandwidth) {
    double out = 0.0;
    const double norm =
        1.0 / (nsamples * bandwidth * std::sqrt(6.283185307179586476925287));
    kde_eval_impl<lane_scalar>(&at, 0, 1, samples, nsamples, bandwidth, norm,
                               &out);
    return out;
}

} // namespace tiplab::kern
