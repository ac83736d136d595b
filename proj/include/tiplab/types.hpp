// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tiplab {

/// Parameters shared by every subsystem: ramp rate and noise strength on x.
/// sigma1 = 0 recovers the deterministic dynamics exactly.
struct SystemParams {
    double r = 1.0;       ///< ramp rate, > 0
    double sigma1 = 0.15; ///< noise strength on x, >= 0

    void validate() const {
        if (!(r > 0.0)) throw std::invalid_argument("SystemParams: r must be > 0");
        if (!(sigma1 >= 0.0)) throw std::invalid_argument("SystemParams: sigma1 must be >= 0");
    }
};

/// State of the compactified two-dimensional system. The ramp coordinate y
/// lives in [0, 3]; the planes y = 0 and y = 3 are invariant.
struct PhasePoint2 {
    double x = 0.0;
    double y = 0.0;
};

/// State of the three-dimensional path system: (x, p, y) with p the conjugate
/// momentum measuring work done against the drift. p = 0 carries the
/// deterministic flow; y = 0 and y = 3 stay invariant.
struct PhasePoint3 {
    double x = 0.0;
    double p = 0.0;
    double y = 0.0;
};

enum class PathKind { deterministic, mpp, stochastic_realization };

template <class Point>
struct Trajectory {
    std::vector<double> t;
    std::vector<Point> state;
    SystemParams params;
    PathKind kind = PathKind::deterministic;

    std::size_t size() const { return t.size(); }
    bool empty() const { return t.empty(); }
    void push_back(double time, const Point& s) {
        t.push_back(time);
        state.push_back(s);
    }
};

// Recoverable numerical outcomes get their own exception types so callers
// (and the CLI exit-code mapping) can tell them apart from programmer error.
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SupercriticalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoBracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OffPlaneError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnresolvedQuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoIntersectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MultipleIntersectionsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientSamplesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateBinsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoEscapesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ramp rate above which the deterministic system tips on its own.
inline constexpr double kCriticalRate = 4.0 / 3.0;

/// Saddle at the foot of the ramp, (x, p, y) = (-1, 0, 0).
inline constexpr PhasePoint3 kSaddle1{-1.0, 0.0, 0.0};
/// Saddle at the top of the ramp, (x, p, y) = (-2, 0, 3).
inline constexpr PhasePoint3 kSaddle2{-2.0, 0.0, 3.0};

inline double distance3(const PhasePoint3& a, const PhasePoint3& b) {
    const double dx = a.x - b.x, dp = a.p - b.p, dy = a.y - b.y;
    return std::sqrt(dx * dx + dp * dp + dy * dy);
}

inline double distance2(const PhasePoint2& a, const PhasePoint2& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

} // namespace tiplab
