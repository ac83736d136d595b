// SPDX-License-Identifier: Apache-2.0
#pragma once

// Template bodies for the lane kernels. Included by the scalar and the AVX2
// translation units only; everything here must stay free of branches on lane
// values so the two instantiations execute identical IEEE operations.

#include "tiplab/kern/pack.hpp"
#include "tiplab/kern/philox.hpp"
#include "tiplab/kern/vmath.hpp"

#include <cstdint>

namespace tiplab::kern {

// Fills lanes [lane_begin, lane_end) of rows with width row_stride; lane l
// draws from stream stream0 + l. lane_end - lane_begin must be a multiple of
// L::width; the dispatch wrappers peel the remainder onto the scalar
// instantiation.
template <class L>
inline void fill_normals_block_impl(std::uint64_t master_seed,
                                    std::uint64_t stream0, int lane_begin,
                                    int lane_end, int row_stride, long step0,
                                    int nsteps, double* out) {
    if (nsteps <= 0 || lane_end <= lane_begin) return;
    const long step_end = step0 + nsteps;
    const long c_lo = step0 >> 1;
    const long c_hi = (step_end - 1) >> 1; // inclusive

    for (int base = lane_begin; base + L::width <= lane_end; base += L::width) {
        std::uint64_t k0w[L::width], k1w[L::width];
        for (int l = 0; l < L::width; ++l) {
            const PhiloxKey key = stream_key(master_seed, stream0 + base + l);
            k0w[l] = key.k0;
            k1w[l] = key.k1;
        }
        const auto k0 = L::iload(k0w);
        const auto k1 = L::iload(k1w);

        for (long c = c_lo; c <= c_hi; ++c) {
            const auto ph =
                philox4x32_10_pack<L>(static_cast<std::uint64_t>(c), k0, k1);
            const auto w1 = L::ori(L::slli(ph.c0, 32), ph.c1);
            const auto w2 = L::ori(L::slli(ph.c2, 32), ph.c3);
            const auto u1 = L::mul(
                L::add(L::u52_to_f(L::srli(w1, 12)), L::set(0.5)),
                L::set(0x1p-52));
            const auto u2 = L::mul(
                L::add(L::u52_to_f(L::srli(w2, 12)), L::set(0.5)),
                L::set(0x1p-52));

            const auto radius =
                L::sqrt(L::mul(L::set(-2.0), klog<L>(u1)));
            typename L::f c2pi, s2pi;
            kcossin2pi<L>(u2, &c2pi, &s2pi);

            const long s0 = 2 * c, s1 = 2 * c + 1;
            if (s0 >= step0 && s0 < step_end)
                L::store(out + (std::size_t)(s0 - step0) * row_stride + base,
                         L::mul(radius, c2pi));
            if (s1 >= step0 && s1 < step_end)
                L::store(out + (std::size_t)(s1 - step0) * row_stride + base,
                         L::mul(radius, s2pi));
        }
    }
}

struct EmChunkArgsView {
    double* x;
    double* first_cross;
    double* guard_step;
    int nlanes;       // full row width of z / snap
    int lane_begin;   // sub-range handled by this instantiation
    int lane_end;
    const double* y;
    const double* thr;
    const double* z;
    long n0;
    int nsteps;
    double dt;
    double sig_sqrt_dt;
    double guard_x;
    double* snap;
    int snap_every;
};

template <class L>
inline void em_advance_impl(const EmChunkArgsView& a) {
    const auto one = L::set(1.0);
    const auto dtv = L::set(a.dt);
    const auto sgv = L::set(a.sig_sqrt_dt);
    const auto guard = L::set(a.guard_x);
    const auto none = L::set(-1.0);

    for (int base = a.lane_begin; base + L::width <= a.lane_end;
         base += L::width) {
        auto xv = L::load(a.x + base);
        auto fc = L::load(a.first_cross + base);
        auto gs = L::load(a.guard_step + base);
        int rows = 0;
        for (int s = 0; s < a.nsteps; ++s) {
            const auto yv = L::set(a.y[s]);
            const auto xy = L::add(xv, yv);
            const auto drift = L::sub(L::mul(xy, xy), one);
            const auto zn =
                L::load(a.z + (std::size_t)s * a.nlanes + base);
            const auto xn = L::add(L::add(xv, L::mul(drift, dtv)),
                                   L::mul(zn, sgv));
            const auto frozen = L::cmpge(gs, L::set(0.0));
            xv = L::select(frozen, xv, xn);

            const auto step_idx = L::set((double)(a.n0 + s + 1));
            const auto crossed = L::andf(L::cmpge(xv, L::set(a.thr[s])),
                                         L::cmplt(fc, L::set(0.0)));
            fc = L::select(crossed, step_idx, fc);
            const auto tripped = L::andf(L::cmpgt(xv, guard),
                                         L::cmplt(gs, L::set(0.0)));
            gs = L::select(tripped, step_idx, gs);

            if (a.snap_every > 0 && ((a.n0 + s + 1) % a.snap_every) == 0) {
                L::store(a.snap + (std::size_t)rows * a.nlanes + base, xv);
                ++rows;
            }
        }
        L::store(a.x + base, xv);
        L::store(a.first_cross + base, fc);
        L::store(a.guard_step + base, gs);
        (void)none;
    }
}

template <class L>
inline void kde_eval_impl(const double* grid, int g_begin, int g_end,
                          const double* samples, int nsamples,
                          double bandwidth, double norm, double* out) {
    const auto inv_bw = L::set(1.0 / bandwidth);
    const auto mhalf = L::set(-0.5);
    for (int base = g_begin; base + L::width <= g_end; base += L::width) {
        auto acc = L::set(0.0);
        const auto gv = L::load(grid + base);
        for (int s = 0; s < nsamples; ++s) {
            const auto d = L::mul(L::sub(gv, L::set(samples[s])), inv_bw);
            acc = L::add(acc, kexp<L>(L::mul(mhalf, L::mul(d, d))));
        }
        L::store(out + base, L::mul(acc, L::set(norm)));
    }
}

} // namespace tiplab::kern
