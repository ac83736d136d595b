// SPDX-License-Identifier: Apache-2.0
#pragma once

// Adaptive Dormand-Prince 5(4) integrator on small fixed-size states.
// Event crossings are located by bisection on single sub-steps taken from
// the last accepted point, so the event state carries full integrator
// accuracy rather than interpolant accuracy.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

namespace tiplab {

template <int N>
using StateN = std::array<double, N>;

struct OdeOptions {
    double atol = 1e-10;
    double rtol = 1e-8;
    double h_init = 1e-4;
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 4000000;
    bool record = false;
    double event_tol = 1e-10; ///< |g| at a located event
};

enum class OdeStatus { reached_end, event, stopped, max_steps, step_underflow };

template <int N>
struct OdeResult {
    OdeStatus status = OdeStatus::reached_end;
    double t = 0.0;
    StateN<N> y{};
    int stop_code = 0; ///< value returned by the stop callback
    std::vector<double> ts;
    std::vector<StateN<N>> ys;
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;
};

namespace rk45_detail {

inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0,
                        b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                        b6 = 11.0 / 84.0;
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                        c5 = 8.0 / 9.0;
// 5th-minus-4th order error weights
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                        e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

/// One Dormand-Prince step from (t, y) with width h. k1 = f(t, y) must be
/// supplied; returns y1, the embedded error estimate, and k7 = f(t+h, y1).
template <int N, class RHS>
inline void dp_step(RHS& f, double t, const StateN<N>& y, double h,
                    const StateN<N>& k1, StateN<N>& y1, StateN<N>& err,
                    StateN<N>& k7) {
    StateN<N> k2, k3, k4, k5, k6, w;
    for (int i = 0; i < N; ++i) w[i] = y[i] + h * (a21 * k1[i]);
    f(t + c2 * h, w, k2);
    for (int i = 0; i < N; ++i) w[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, w, k3);
    for (int i = 0; i < N; ++i)
        w[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, w, k4);
    for (int i = 0; i < N; ++i)
        w[i] = y[i] +
               h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, w, k5);
    for (int i = 0; i < N; ++i)
        w[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                           a64 * k4[i] + a65 * k5[i]);
    f(t + h, w, k6);
    for (int i = 0; i < N; ++i)
        y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
    f(t + h, y1, k7);
    for (int i = 0; i < N; ++i)
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                      e6 * k6[i] + e7 * k7[i]);
}

} // namespace rk45_detail

template <int N, class RHS, class Event = std::nullptr_t,
          class Stop = std::nullptr_t>
OdeResult<N> integrate_rk45(RHS&& f, double t0, StateN<N> y0, double t1,
                            const OdeOptions& opt = {}, Event&& event = Event{},
                            Stop&& stop = Stop{}) {
    constexpr bool has_event = !std::is_same_v<std::decay_t<Event>, std::nullptr_t>;
    constexpr bool has_stop = !std::is_same_v<std::decay_t<Stop>, std::nullptr_t>;

    OdeResult<N> res;
    double t = t0;
    StateN<N> y = y0;
    const double dir = (t1 >= t0) ? 1.0 : -1.0;

    if (opt.record) {
        res.ts.push_back(t);
        res.ys.push_back(y);
    }
    if (t0 == t1) {
        res.t = t;
        res.y = y;
        return res;
    }

    StateN<N> k1, k7, y1, errv;
    f(t, y, k1);
    double g_prev = 0.0;
    if constexpr (has_event) g_prev = event(t, y);

    double h = dir * std::min({opt.h_init, opt.h_max, std::fabs(t1 - t0)});

    while (res.n_accepted + res.n_rejected < opt.max_steps) {
        bool last = false;
        if ((t + 1.01 * h - t1) * dir > 0.0) {
            h = t1 - t;
            last = true;
        }
        if (std::fabs(h) < 4.0 * std::numeric_limits<double>::epsilon() *
                               std::max(1.0, std::fabs(t))) {
            res.status = OdeStatus::step_underflow;
            break;
        }

        rk45_detail::dp_step<N>(f, t, y, h, k1, y1, errv, k7);

        double err = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc =
                opt.atol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(y1[i]));
            const double q = errv[i] / sc;
            err += q * q;
        }
        err = std::sqrt(err / N);

        if (err <= 1.0) {
            ++res.n_accepted;

            if constexpr (has_event) {
                const double g_new = event(t + h, y1);
                if ((g_prev < 0.0 && g_new >= 0.0) ||
                    (g_prev > 0.0 && g_new <= 0.0)) {
                    // locate by bisection on sub-steps from (t, y)
                    double lo = 0.0, hi = h, gh = g_new;
                    StateN<N> ye = y1, ytmp, etmp, ktmp;
                    for (int it = 0; it < 64; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        if (mid == lo || mid == hi) break;
                        rk45_detail::dp_step<N>(f, t, y, mid, k1, ytmp, etmp,
                                                ktmp);
                        const double gm = event(t + mid, ytmp);
                        if ((g_prev < 0.0 && gm >= 0.0) ||
                            (g_prev > 0.0 && gm <= 0.0)) {
                            hi = mid;
                            gh = gm;
                            ye = ytmp;
                        } else {
                            lo = mid;
                        }
                        if (std::fabs(gh) <= opt.event_tol) break;
                    }
                    res.status = OdeStatus::event;
                    res.t = t + hi;
                    res.y = ye;
                    if (opt.record) {
                        res.ts.push_back(res.t);
                        res.ys.push_back(res.y);
                    }
                    return res;
                }
                g_prev = g_new;
            }

            t += h;
            y = y1;
            k1 = k7;
            if (opt.record) {
                res.ts.push_back(t);
                res.ys.push_back(y);
            }

            if constexpr (has_stop) {
                const int code = stop(t, y);
                if (code != 0) {
                    res.status = OdeStatus::stopped;
                    res.stop_code = code;
                    res.t = t;
                    res.y = y;
                    return res;
                }
            }

            if (last) {
                res.status = OdeStatus::reached_end;
                res.t = t;
                res.y = y;
                return res;
            }
            const double fac =
                std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            h *= fac;
            if (std::fabs(h) > opt.h_max) h = dir * opt.h_max;
        } else {
            ++res.n_rejected;
            const double fac =
                std::min(1.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            h *= fac;
        }
    }

    if (res.status != OdeStatus::step_underflow)
        res.status = OdeStatus::max_steps;
    res.t = t;
    res.y = y;
    return res;
}

} // namespace tiplab
