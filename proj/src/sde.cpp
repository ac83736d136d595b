// SPDX-License-Identifier: Apache-2.0

#include "tiplab/sde.hpp"

#include "tiplab/dynamics.hpp"
#include "tiplab/kern/kernels.hpp"
#include "tiplab/rk45.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <thread>

namespace tiplab {

void SimConfig::validate() const {
    params.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
    if (!(t1 > t0)) throw std::invalid_argument("SimConfig: t1 must exceed t0");
    if (n_realizations < 1)
        throw std::invalid_argument("SimConfig: n_realizations must be >= 1");
    if (stride < 1) throw std::invalid_argument("SimConfig: stride must be >= 1");
    if (!(y0 > 0.0 && y0 < 3.0))
        throw std::invalid_argument("SimConfig: y0 must lie in (0, 3)");
}

long SimConfig::n_steps() const {
    return std::lround((t1 - t0) / dt);
}

double em_step(double x, double y, const SystemParams& params, double dt,
               double dW) {
    const double xy = x + y;
    return x + (xy * xy - 1.0) * dt + params.sigma1 * dW;
}

std::vector<double> y_grid(const SimConfig& cfg) {
    const long steps = cfg.n_steps();
    std::vector<double> y(steps + 1);
    if (cfg.y_mode == SimConfig::YMode::closed_form) {
        // logistic solution through (t0, y0)
        const double c = (3.0 - cfg.y0) / cfg.y0;
        for (long n = 0; n <= steps; ++n) {
            const double t = (double)n * cfg.dt;
            y[n] = 3.0 / (1.0 + c * std::exp(-3.0 * cfg.params.r * t));
        }
        return y;
    }
    const double r = cfg.params.r;
    auto f = [r](double v) { return r * v * (3.0 - v); };
    double v = cfg.y0;
    y[0] = v;
    for (long n = 1; n <= steps; ++n) {
        const double h = cfg.dt;
        const double k1 = f(v);
        const double k2 = f(v + 0.5 * h * k1);
        const double k3 = f(v + 0.5 * h * k2);
        const double k4 = f(v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        y[n] = v;
    }
    return y;
}

ThresholdCurve::ThresholdCurve(const SystemParams& params, double delta,
                               double y_min) {
    params.validate();
    const double r = params.r;
    // stable eigendirection of (-2, 3): (-2/(3r+2), 1)
    const double vx = -2.0 / (3.0 * r + 2.0);
    const PhasePoint2 start{-2.0 - delta * vx, 3.0 - delta};

    auto rhs = [r](double /*t*/, const StateN<2>& q, StateN<2>& dq) {
        dq[0] = (q[0] + q[1]) * (q[0] + q[1]) - 1.0;
        dq[1] = r * q[1] * (3.0 - q[1]);
    };
    // above the critical rate the manifold dives to -inf at some positive y;
    // the curve is returned truncated there
    auto stop = [y_min](double /*t*/, const StateN<2>& q) -> int {
        if (q[1] < y_min) return 1;
        if (std::fabs(q[0]) > 1e3) return 2;
        return 0;
    };
    OdeOptions opt;
    opt.atol = 1e-12;
    opt.rtol = 1e-10;
    opt.record = true;
    opt.h_max = 0.05;
    auto res = integrate_rk45<2>(rhs, 0.0, StateN<2>{start.x, start.y}, -400.0,
                                 opt, nullptr, stop);
    if (res.status != OdeStatus::stopped)
        throw std::runtime_error("ThresholdCurve: backward run did not reach "
                                 "the y floor");

    // backward samples have decreasing y; reverse and append the anchor (3,-2)
    std::vector<double> ys, xs;
    ys.reserve(res.ys.size() + 1);
    xs.reserve(res.ys.size() + 1);
    for (std::size_t i = res.ys.size(); i-- > 0;) {
        const double yv = res.ys[i][1];
        if (!ys.empty() && yv - ys.back() < 1e-12) continue;
        ys.push_back(yv);
        xs.push_back(res.ys[i][0]);
    }
    if (ys.back() < 3.0 - 1e-12) {
        ys.push_back(3.0);
        xs.push_back(-2.0);
    }
    interp_ = Pchip(std::move(ys), std::move(xs));
}

double ThresholdCurve::operator()(double y) const { return interp_(y); }

namespace {

constexpr int kBlockLanes = 8;
constexpr int kChunkSteps = 512;

struct SharedGrids {
    std::vector<double> y;   // y_n, n = 0..S
    std::vector<double> thr; // thr_n, n = 0..S (thr[0] unused by the kernel)
    long steps = 0;
};

SharedGrids make_grids(const SimConfig& cfg) {
    SharedGrids g;
    g.y = y_grid(cfg);
    g.steps = cfg.n_steps();
    const ThresholdCurve thr(cfg.params);
    g.thr.resize(g.y.size());
    for (std::size_t i = 0; i < g.y.size(); ++i) g.thr[i] = thr(g.y[i]);
    return g;
}

struct BlockResult {
    double x[kBlockLanes];
    double first_cross[kBlockLanes];
    double guard[kBlockLanes];
    std::vector<double> snap; // [rows][kBlockLanes]
};

void run_block(const SimConfig& cfg, const SharedGrids& g,
               std::uint64_t stream_base, BlockResult& out) {
    const long steps = g.steps;
    const int snap_every = cfg.store_paths ? cfg.stride : 0;
    const int total_rows =
        snap_every > 0 ? kern::em_snap_rows(0, steps, snap_every) : 0;
    out.snap.assign((std::size_t)total_rows * kBlockLanes, 0.0);

    for (int l = 0; l < kBlockLanes; ++l) {
        out.x[l] = cfg.x0;
        out.first_cross[l] = -1.0;
        out.guard[l] = -1.0;
    }

    std::vector<double> noise((std::size_t)kChunkSteps * kBlockLanes);
    const double sig_sqrt_dt = cfg.params.sigma1 * std::sqrt(cfg.dt);

    long n0 = 0;
    double* snap_cursor = out.snap.data();
    while (n0 < steps) {
        const int chunk = (int)std::min<long>(kChunkSteps, steps - n0);
        kern::fill_normals_block(cfg.seed, stream_base, kBlockLanes, n0, chunk,
                                 noise.data());
        kern::EmChunkArgs args;
        args.x = out.x;
        args.first_cross = out.first_cross;
        args.guard_step = out.guard;
        args.nlanes = kBlockLanes;
        args.y = g.y.data() + n0;
        args.thr = g.thr.data() + n0 + 1;
        args.z = noise.data();
        args.n0 = n0;
        args.nsteps = chunk;
        args.dt = cfg.dt;
        args.sig_sqrt_dt = sig_sqrt_dt;
        args.guard_x = cfg.x_guard;
        args.snap = snap_cursor;
        args.snap_every = snap_every;
        kern::em_advance(args);
        snap_cursor += (std::size_t)kern::em_snap_rows(n0, chunk, snap_every) *
                       kBlockLanes;
        n0 += chunk;
    }
}

RealizationOutcome classify_lane(const SimConfig& cfg, const SharedGrids& g,
                                 double x_final, double first_cross,
                                 double guard_step) {
    if (guard_step >= 0.0 && first_cross >= 0.0) return RealizationOutcome::tipped;
    if (guard_step < 0.0 && std::fabs(x_final + 4.0) <= cfg.track_radius_x &&
        std::fabs(g.y[g.steps] - 3.0) <= cfg.track_tol_y)
        return RealizationOutcome::tracked;
    return RealizationOutcome::indeterminate;
}

} // namespace

EnsembleResult run_ensemble(const SimConfig& cfg) {
    cfg.validate();
    const SharedGrids grids = make_grids(cfg);
    const long steps = grids.steps;
    const int n = cfg.n_realizations;
    const int nblocks = (n + kBlockLanes - 1) / kBlockLanes;

    EnsembleResult res;
    res.config = cfg;
    res.n = n;
    res.outcome.resize(n);
    res.first_passage.assign(n, -1.0);
    res.guard_step.assign(n, -1);
    res.x_final.assign(n, 0.0);

    const int snap_every = cfg.store_paths ? cfg.stride : 0;
    int total_rows = 0;
    if (cfg.store_paths) {
        total_rows = kern::em_snap_rows(0, steps, snap_every);
        res.path_times.resize(total_rows + 1);
        res.path_y.resize(total_rows + 1);
        res.path_times[0] = cfg.t0;
        res.path_y[0] = grids.y[0];
        for (int j = 1; j <= total_rows; ++j) {
            const long m = (long)j * snap_every;
            res.path_times[j] = cfg.t0 + m * cfg.dt;
            res.path_y[j] = grids.y[m];
        }
        res.paths.assign(n, {});
    }

    std::vector<BlockResult> blocks(nblocks);
    int nthreads = cfg.threads > 0
                       ? cfg.threads
                       : (int)std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min(nthreads, nblocks);

    auto worker = [&](int tid) {
        for (int b = tid; b < nblocks; b += nthreads) {
            run_block(cfg, grids,
                      cfg.stream_offset + (std::uint64_t)b * kBlockLanes,
                      blocks[b]);
        }
    };
    if (nthreads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < n; ++i) {
        const BlockResult& b = blocks[i / kBlockLanes];
        const int l = i % kBlockLanes;
        res.x_final[i] = b.x[l];
        if (b.first_cross[l] >= 0.0)
            res.first_passage[i] = cfg.t0 + b.first_cross[l] * cfg.dt;
        res.guard_step[i] = b.guard[l] >= 0.0 ? (long)b.guard[l] : -1;
        res.outcome[i] = classify_lane(cfg, grids, b.x[l], b.first_cross[l],
                                       b.guard[l]);
        switch (res.outcome[i]) {
        case RealizationOutcome::tipped: ++res.m_tipped; break;
        case RealizationOutcome::tracked: ++res.n_tracked; break;
        case RealizationOutcome::indeterminate: ++res.n_indeterminate; break;
        }
        if (cfg.store_paths) {
            auto& p = res.paths[i];
            p.resize(total_rows + 1);
            p[0] = cfg.x0;
            for (int j = 1; j <= total_rows; ++j)
                p[j] = b.snap[(std::size_t)(j - 1) * kBlockLanes + l];
            if (res.guard_step[i] >= 0) {
                // samples at or past the divergence step carry no state
                for (int j = 0; j <= total_rows; ++j)
                    if ((long)j * snap_every >= res.guard_step[i]) p[j] = nan;
            }
        }
    }
    return res;
}

Realization simulate_realization(const SimConfig& cfg, std::uint64_t stream_id) {
    SimConfig one = cfg;
    one.n_realizations = 1;
    one.stream_offset = stream_id;
    one.store_paths = true;
    one.threads = 1;
    const EnsembleResult er = run_ensemble(one);

    Realization r;
    r.t = er.path_times;
    r.x = er.paths[0];
    r.y = er.path_y;
    r.outcome = er.outcome[0];
    r.crossed = er.first_passage[0] >= 0.0;
    r.first_passage = er.first_passage[0];
    r.guard_step = er.guard_step[0];
    r.x_final = er.x_final[0];
    return r;
}

std::vector<double> EnsembleResult::tip_times() const {
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        if (outcome[i] == RealizationOutcome::tipped) out.push_back(first_passage[i]);
    return out;
}

} // namespace tiplab
