// SPDX-License-Identifier: Apache-2.0

#include "tiplab/dynamics.hpp"

#include "tiplab/rk45.hpp"

#include <cmath>
#include <stdexcept>

namespace tiplab {

double ramp(double t, double r) {
    // (3/2)(1 + tanh(3rt/2)) == 3 / (1 + exp(-3rt)); the tanh form loses
    // ~3 significant digits near the y = 0 tail, the logistic form does not.
    return 3.0 / (1.0 + std::exp(-3.0 * r * t));
}

Vel2 drift2(const PhasePoint2& pt, double r) {
    const double xy = pt.x + pt.y;
    return {xy * xy - 1.0, r * pt.y * (3.0 - pt.y)};
}

FrozenEquilibria frozen_equilibria(double y) {
    return {-1.0 - y, 1.0 - y};
}

namespace {

constexpr int kStopGuard = 1;
constexpr int kStopTarget = 2;

} // namespace

DetRun integrate_deterministic(const PhasePoint2& start, const SystemParams& params,
                               double t0, double t1, const DetOptions& opt) {
    params.validate();
    const double r = params.r;

    auto rhs = [r](double /*t*/, const StateN<2>& y, StateN<2>& dy) {
        dy[0] = (y[0] + y[1]) * (y[0] + y[1]) - 1.0;
        dy[1] = r * y[1] * (3.0 - y[1]);
    };
    auto stop_fn = [&opt](double /*t*/, const StateN<2>& y) -> int {
        if (y[0] > opt.x_guard) return kStopGuard;
        const double dx = y[0] + 4.0, dy = y[1] - 3.0;
        if (dx * dx + dy * dy < opt.track_radius * opt.track_radius)
            return kStopTarget;
        return 0;
    };

    OdeOptions oopt;
    oopt.atol = opt.atol;
    oopt.rtol = opt.rtol;
    oopt.h_max = opt.h_max;
    oopt.record = opt.record;

    auto res = integrate_rk45<2>(rhs, t0, StateN<2>{start.x, start.y}, t1, oopt,
                                 nullptr, stop_fn);
    if (res.status == OdeStatus::step_underflow ||
        res.status == OdeStatus::max_steps)
        throw std::runtime_error("integrate_deterministic: integrator stalled");

    DetRun run;
    run.trajectory.params = params;
    run.trajectory.kind = PathKind::deterministic;
    run.trajectory.t = std::move(res.ts);
    run.trajectory.state.reserve(res.ys.size());
    for (const auto& s : res.ys) run.trajectory.state.push_back({s[0], s[1]});
    run.t_final = res.t;
    run.final_state = {res.y[0], res.y[1]};
    run.stop = DetStop::span_end;
    if (res.status == OdeStatus::stopped)
        run.stop = (res.stop_code == kStopGuard) ? DetStop::guard_tripped
                                                 : DetStop::target_reached;
    return run;
}

DetOutcome classify_deterministic(const DetRun& run, const DetOptions& opt) {
    if (run.stop == DetStop::guard_tripped) return DetOutcome::tips;
    if (run.stop == DetStop::target_reached) return DetOutcome::tracks;
    const double dx = run.final_state.x + 4.0, dy = run.final_state.y - 3.0;
    if (dx * dx + dy * dy < opt.track_radius * opt.track_radius)
        return DetOutcome::tracks;
    return DetOutcome::indeterminate;
}

CriticalRateResult find_critical_rate(double r_lo, double r_hi, double tol,
                                      const DetOptions& opt, double t_span,
                                      double y0) {
    if (!(r_lo > 0.0 && r_hi > r_lo && tol > 0.0))
        throw std::invalid_argument("find_critical_rate: bad interval");

    DetOptions copt = opt;
    copt.record = false;

    auto tips_at = [&](double r) {
        // the ramp takes ~10/r to traverse from the fixed y0; give the slow
        // rates room to finish and settle
        const double span = std::max(t_span, 12.0 / r + 25.0);
        const DetRun run = integrate_deterministic({-1.0, y0}, {r, 0.0}, 0.0,
                                                   span, copt);
        const DetOutcome out = classify_deterministic(run, copt);
        if (out == DetOutcome::indeterminate)
            throw std::runtime_error(
                "find_critical_rate: classification indeterminate; "
                "span too short");
        return out == DetOutcome::tips;
    };

    const bool lo_tips = tips_at(r_lo);
    const bool hi_tips = tips_at(r_hi);
    if (lo_tips == hi_tips)
        throw NoBracketError(lo_tips
                                 ? "find_critical_rate: both endpoints tip"
                                 : "find_critical_rate: both endpoints track");

    CriticalRateResult res;
    res.r_lo = r_lo;
    res.r_hi = r_hi;
    while (res.r_hi - res.r_lo > tol) {
        const double mid = 0.5 * (res.r_lo + res.r_hi);
        if (mid <= res.r_lo || mid >= res.r_hi) break;
        if (tips_at(mid) == hi_tips)
            res.r_hi = mid;
        else
            res.r_lo = mid;
        ++res.iterations;
    }
    res.r_est = 0.5 * (res.r_lo + res.r_hi);
    return res;
}

} // namespace tiplab
