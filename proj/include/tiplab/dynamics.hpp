// SPDX-License-Identifier: Apache-2.0
#pragma once

// The compactified two-dimensional ramped system
//   x' = (x + y)^2 - 1,  y' = r y (3 - y),  y in [0, 3],
// its frozen equilibria, tip/track classification and the critical-rate
// bisection.

#include "tiplab/types.hpp"

#include <utility>

namespace tiplab {

/// Ramp value (3/2)(1 + tanh(3rt/2)), evaluated in logistic form so the
/// t -> -inf tail keeps full relative precision.
double ramp(double t, double r);

struct Vel2 {
    double dx = 0.0;
    double dy = 0.0;
};

/// Right-hand side of the compactified system.
Vel2 drift2(const PhasePoint2& pt, double r);

struct FrozenEquilibria {
    double x_stable;   ///< attracting branch -1 - y
    double x_unstable; ///< repelling branch   1 - y
};

/// Fixed points of the frozen (y held constant) system.
FrozenEquilibria frozen_equilibria(double y);

struct DetOptions {
    double atol = 1e-10;
    double rtol = 1e-8;
    double h_max = 0.25;         ///< cap on recorded sample spacing
    double x_guard = 1e3;        ///< divergence guard
    double track_radius = 1e-3;  ///< ball around (-4, 3) that counts as tracked
    bool record = true;
};

enum class DetStop { span_end, guard_tripped, target_reached };

struct DetRun {
    Trajectory<PhasePoint2> trajectory;
    DetStop stop = DetStop::span_end;
    double t_final = 0.0;
    PhasePoint2 final_state;
};

/// Integrates the deterministic system over [t0, t1], ending early on the
/// divergence guard (reported as a tipping outcome, not an error) or on
/// entering the tracking ball around (-4, 3).
DetRun integrate_deterministic(const PhasePoint2& start, const SystemParams& params,
                               double t0, double t1, const DetOptions& opt = {});

enum class DetOutcome { tracks, tips, indeterminate };

/// tips iff the guard tripped; tracks iff the run ended inside the tracking
/// ball; indeterminate otherwise (span too short to decide).
DetOutcome classify_deterministic(const DetRun& run, const DetOptions& opt = {});

struct CriticalRateResult {
    double r_lo = 0.0;
    double r_hi = 0.0;
    double r_est = 0.0;
    int iterations = 0;
};

/// Bisection on the tip/track outcome over [r_lo, r_hi]. The interval must
/// bracket the transition, otherwise NoBracketError.
CriticalRateResult find_critical_rate(double r_lo, double r_hi, double tol,
                                      const DetOptions& opt = {},
                                      double t_span = 60.0,
                                      double y0 = 2.80729e-13);

} // namespace tiplab
