// SPDX-License-Identifier: Apache-2.0
#pragma once

// Euler-Maruyama simulation of dx = ((x + y)^2 - 1) dt + sigma1 dW with the
// ramp coordinate advanced deterministically alongside, tipping detection
// against the stable manifold of (-2, 3), and the reproducible parallel
// ensemble runner built on the lane kernels.

#include "tiplab/interp.hpp"
#include "tiplab/types.hpp"

#include <cstdint>
#include <vector>

namespace tiplab {

struct SimConfig {
    SystemParams params;
    double t0 = 0.0;
    double t1 = 30.0;
    double dt = 1e-3;
    double x0 = -1.0;
    double y0 = 2.80729e-13;
    std::uint64_t seed = 0;
    std::uint64_t stream_offset = 0; ///< first stream id of the ensemble
    int n_realizations = 1;
    int stride = 10;         ///< path storage stride (first-passage uses every step)
    bool store_paths = false;
    int threads = 0;         ///< 0 = hardware concurrency
    enum class YMode { ode_rk4, closed_form } y_mode = YMode::ode_rk4;
    double x_guard = 1e3;
    double track_radius_x = 0.5;
    double track_tol_y = 1e-3;

    void validate() const;
    long n_steps() const; ///< steps of width dt covering [t0, t1]
};

/// One Euler-Maruyama update: x + ((x+y)^2 - 1) dt + sigma1 dW.
double em_step(double x, double y, const SystemParams& params, double dt,
               double dW);

/// Ramp-coordinate grid y_0..y_S shared by every realization; either the
/// RK4-substepped ODE (default, honours y0 exactly for every r) or the
/// closed-form ramp through the same initial value.
std::vector<double> y_grid(const SimConfig& cfg);

/// Stable manifold of (-2, 3) of the deterministic system as a queryable
/// threshold x_thr(y); crossing it from below marks a tipping candidate.
class ThresholdCurve {
public:
    explicit ThresholdCurve(const SystemParams& params, double delta = 1e-6,
                            double y_min = 1e-8);
    double operator()(double y) const;
    const Pchip& interpolant() const { return interp_; }

private:
    Pchip interp_;
};

enum class RealizationOutcome { tipped, tracked, indeterminate };

struct Realization {
    std::vector<double> t; ///< strided sample times
    std::vector<double> x;
    std::vector<double> y;
    RealizationOutcome outcome = RealizationOutcome::indeterminate;
    bool crossed = false;
    double first_passage = -1.0; ///< time of first threshold crossing, if any
    long guard_step = -1;        ///< step index of divergence, -1 if none
    double x_final = 0.0;
};

/// Single realization on its own noise stream; bitwise identical to the same
/// stream inside run_ensemble.
Realization simulate_realization(const SimConfig& cfg, std::uint64_t stream_id);

struct EnsembleResult {
    SimConfig config;
    int n = 0;
    int m_tipped = 0;
    int n_tracked = 0;
    int n_indeterminate = 0;
    std::vector<RealizationOutcome> outcome; ///< per realization
    std::vector<double> first_passage;       ///< per realization, -1 if none
    std::vector<long> guard_step;            ///< per realization, -1 if none
    std::vector<double> x_final;
    // strided storage, filled when store_paths
    std::vector<double> path_times;
    std::vector<double> path_y;
    std::vector<std::vector<double>> paths; ///< [i][j], NaN once diverged

    std::vector<double> tip_times() const; ///< first passage of tipped, stream order
};

/// N realizations on streams stream_offset..stream_offset+N-1, executed in
/// lane blocks, merged in stream order. Identical config and seed give
/// bitwise identical results for any thread count.
EnsembleResult run_ensemble(const SimConfig& cfg);

} // namespace tiplab
