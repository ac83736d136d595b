// SPDX-License-Identifier: Apache-2.0
#pragma once

// Mode-path extraction from ensembles, first-passage distribution
// convergence, escape-time estimates for the invariant-plane routes, and the
// power-law fit of expected tipping time against 1/sigma1^2.

#include "tiplab/mpp.hpp"
#include "tiplab/sde.hpp"
#include "tiplab/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace tiplab {

/// Linear-interpolation quantile (order statistics at p*(n-1)).
double quantile_linear(std::span<const double> sorted, double p);
double interquartile_range(std::span<const double> sorted);

/// Silverman bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> samples);

/// Mode of a Gaussian KDE: 512-point grid scan over [min, max] followed by
/// golden-section refinement. Needs >= 30 samples.
double kde_mode(std::span<const double> samples);

struct ModePath {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> x_mode;
};

enum class PathSubset { tipped, tracked };

/// Per-time-step KDE mode over the selected realizations, aligned by
/// absolute simulation time; times with fewer than 30 live paths are
/// dropped. Requires the ensemble to have stored paths.
ModePath mode_path(const EnsembleResult& ensemble, PathSubset subset);

/// Freedman-Diaconis bin edges: width 2*IQR*n^(-1/3), equal-length bins
/// spanning [min, max].
std::vector<double> fd_bin_edges(std::span<const double> samples);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct TipDistribution {
    std::vector<double> samples; ///< merged first-passage times
    std::vector<double> bin_edges;
    std::vector<double> d1, d2; ///< final-round batch histograms
    double expected_time = 0.0;
    bool converged = false;
    double err = 0.0;
    double ks_p = 0.0;
    int rounds = 0;
    long n_per_batch_final = 0;
    long total_realizations = 0;
    long total_tipped = 0;
};

/// The two-batch protocol: run N, bin by Freedman-Diaconis, run another N,
/// re-bin with the same edges, accept when ||D1-D2||/||D1|| < 0.1 and the KS
/// test does not reject at 0.05; otherwise double N, up to max_rounds.
/// Throws NoEscapesError when a batch produces no tipping events.
TipDistribution converge_tip_distribution(const SimConfig& base,
                                          int max_rounds = 6);

struct KramersTime {
    double value = 0.0;    ///< exp(2 dV / sigma^2), +inf on overflow
    double exponent = 0.0; ///< 2 dV / sigma^2
};

KramersTime kramers_time(double delta_v, double sigma);

/// Barrier heights of the frozen wells in y = 0 and y = 3; both 4/3.
std::pair<double, double> case_barriers();

/// Potential of the frozen y = 0 system, V(x) = x - x^3/3 (so that -V' is
/// the drift x^2 - 1).
double case1_potential(double x);

/// Closed form 16/3 of the invariant-plane escape action.
double case12_action_analytic();

/// The same action by quadrature along the zero-level arc
/// p = 2 (1 - (x+y)^2) / sigma1^2 in the y = 0 plane.
ActionValue case12_action_numeric(const SystemParams& params);

struct PowerLawFit {
    double a = 0.0; ///< prefactor
    double b = 0.0; ///< exponent
    double r_value = 0.0;
    std::vector<double> log_inv_sigma2;
    std::vector<double> log_tau;
    std::vector<double> residuals;
};

/// Least squares on (log(1/sigma^2), log tau) pairs.
PowerLawFit power_law_fit(std::span<const std::pair<double, double>> sigma_tau);

} // namespace tiplab
