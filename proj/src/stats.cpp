// SPDX-License-Identifier: Apache-2.0

#include "tiplab/stats.hpp"

#include "tiplab/kern/kernels.hpp"
#include "tiplab/rk45.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tiplab {

double quantile_linear(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 0) throw std::invalid_argument("quantile: empty sample");
    if (n == 1) return sorted[0];
    const double pos = p * (double)(n - 1);
    const std::size_t lo = (std::size_t)std::floor(pos);
    if (lo + 1 >= n) return sorted[n - 1];
    const double w = pos - (double)lo;
    return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

double interquartile_range(std::span<const double> sorted) {
    return quantile_linear(sorted, 0.75) - quantile_linear(sorted, 0.25);
}

double silverman_bandwidth(std::span<const double> samples) {
    const std::size_t n = samples.size();
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
    double var = 0.0;
    for (const double v : s) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / (n > 1 ? n - 1 : 1));
    const double iqr = interquartile_range(s);
    double a = std::min(sd, iqr / 1.34);
    if (a <= 0.0) a = sd; // degenerate IQR, fall back to the spread
    return 0.9 * a * std::pow((double)n, -0.2);
}

double kde_mode(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 30)
        throw InsufficientSamplesError("kde_mode: fewer than 30 samples");
    const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
    const double mn = *mn_it, mx = *mx_it;
    if (mn == mx) return mn;
    const double bw = silverman_bandwidth(samples);
    if (!(bw > 0.0)) return mn;

    constexpr int kGrid = 512;
    std::vector<double> grid(kGrid), dens(kGrid);
    for (int i = 0; i < kGrid; ++i)
        grid[i] = mn + (mx - mn) * i / (kGrid - 1);
    kern::kde_eval(grid.data(), kGrid, samples.data(), (int)n, bw, dens.data());
    const int best =
        (int)(std::max_element(dens.begin(), dens.end()) - dens.begin());

    // golden-section refinement around the best grid cell
    const double step = (mx - mn) / (kGrid - 1);
    double a = std::max(mn, grid[best] - step);
    double b = std::min(mx, grid[best] + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = kern::kde_eval_one(x1, samples.data(), (int)n, bw);
    double f2 = kern::kde_eval_one(x2, samples.data(), (int)n, bw);
    for (int it = 0; it < 80 && b - a > 1e-12 * (mx - mn); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = kern::kde_eval_one(x2, samples.data(), (int)n, bw);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = kern::kde_eval_one(x1, samples.data(), (int)n, bw);
        }
    }
    return 0.5 * (a + b);
}

ModePath mode_path(const EnsembleResult& ensemble, PathSubset subset) {
    if (ensemble.paths.empty())
        throw std::invalid_argument("mode_path: ensemble stored no paths");
    const RealizationOutcome want = subset == PathSubset::tipped
                                        ? RealizationOutcome::tipped
                                        : RealizationOutcome::tracked;
    std::vector<int> members;
    for (int i = 0; i < ensemble.n; ++i)
        if (ensemble.outcome[i] == want) members.push_back(i);
    if (members.size() < 30)
        throw InsufficientSamplesError(
            "mode_path: fewer than 30 paths in the subset");

    ModePath mp;
    std::vector<double> xs;
    xs.reserve(members.size());
    for (std::size_t j = 0; j < ensemble.path_times.size(); ++j) {
        xs.clear();
        for (const int i : members) {
            const double v = ensemble.paths[i][j];
            if (std::isfinite(v)) xs.push_back(v);
        }
        if (xs.size() < 30) continue;
        mp.t.push_back(ensemble.path_times[j]);
        mp.y.push_back(ensemble.path_y[j]);
        mp.x_mode.push_back(kde_mode(xs));
    }
    if (mp.t.empty())
        throw InsufficientSamplesError("mode_path: no time with 30 live paths");
    return mp;
}

std::vector<double> fd_bin_edges(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 4) throw DegenerateBinsError("fd_bin_edges: need >= 4 samples");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const double iqr = interquartile_range(s);
    if (iqr <= 0.0) throw DegenerateBinsError("fd_bin_edges: zero IQR");
    const double width = 2.0 * iqr * std::pow((double)n, -1.0 / 3.0);
    const double range = s.back() - s.front();
    const int nbins = std::max(1, (int)std::ceil(range / width));
    std::vector<double> edges(nbins + 1);
    for (int i = 0; i <= nbins; ++i)
        edges[i] = s.front() + range * i / nbins;
    return edges;
}

namespace {

std::vector<double> histogram_clamped(std::span<const double> samples,
                                      const std::vector<double>& edges) {
    const int nbins = (int)edges.size() - 1;
    std::vector<double> counts(nbins, 0.0);
    for (const double v : samples) {
        int b;
        if (v <= edges.front())
            b = 0;
        else if (v >= edges.back())
            b = nbins - 1;
        else
            b = (int)(std::upper_bound(edges.begin(), edges.end(), v) -
                      edges.begin()) - 1;
        counts[b] += 1.0;
    }
    return counts;
}

double ks_asymptotic_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 101; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

} // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const std::size_t n1 = sa.size(), n2 = sb.size();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < n1 && j < n2) {
        const double v = std::min(sa[i], sb[j]);
        while (i < n1 && sa[i] <= v) ++i;
        while (j < n2 && sb[j] <= v) ++j;
        d = std::max(d, std::fabs((double)i / n1 - (double)j / n2));
    }
    const double ne = (double)n1 * n2 / (double)(n1 + n2);
    const double sq = std::sqrt(ne);
    KsResult res;
    res.statistic = d;
    res.p_value = ks_asymptotic_q((sq + 0.12 + 0.11 / sq) * d);
    return res;
}

TipDistribution converge_tip_distribution(const SimConfig& base, int max_rounds) {
    base.validate();
    TipDistribution dist;
    long n = base.n_realizations;
    std::uint64_t next_stream = base.stream_offset;

    auto run_batch = [&](long count) {
        SimConfig cfg = base;
        cfg.n_realizations = (int)count;
        cfg.stream_offset = next_stream;
        cfg.store_paths = false;
        next_stream += (std::uint64_t)count;
        dist.total_realizations += count;
        const EnsembleResult er = run_ensemble(cfg);
        dist.total_tipped += er.m_tipped;
        return er.tip_times();
    };

    for (int round = 1; round <= max_rounds; ++round, n *= 2) {
        dist.rounds = round;
        dist.n_per_batch_final = n;
        const std::vector<double> s1 = run_batch(n);
        if (s1.size() < 4)
            throw NoEscapesError("converge_tip_distribution: batch produced "
                                 "fewer than 4 tipping events");
        const std::vector<double> s2 = run_batch(n);
        if (s2.empty())
            throw NoEscapesError("converge_tip_distribution: second batch "
                                 "produced no tipping events");

        dist.bin_edges = fd_bin_edges(s1);
        dist.d1 = histogram_clamped(s1, dist.bin_edges);
        dist.d2 = histogram_clamped(s2, dist.bin_edges);

        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < dist.d1.size(); ++k) {
            num += (dist.d1[k] - dist.d2[k]) * (dist.d1[k] - dist.d2[k]);
            den += dist.d1[k] * dist.d1[k];
        }
        dist.err = std::sqrt(num / den);
        dist.ks_p = ks_two_sample(s1, s2).p_value;

        dist.samples.clear();
        dist.samples.insert(dist.samples.end(), s1.begin(), s1.end());
        dist.samples.insert(dist.samples.end(), s2.begin(), s2.end());
        dist.expected_time =
            std::accumulate(dist.samples.begin(), dist.samples.end(), 0.0) /
            dist.samples.size();

        if (dist.err < 0.1 && dist.ks_p >= 0.05) {
            dist.converged = true;
            break;
        }
    }
    return dist;
}

KramersTime kramers_time(double delta_v, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("kramers_time: sigma must be > 0");
    KramersTime kt;
    kt.exponent = 2.0 * delta_v / (sigma * sigma);
    kt.value = std::exp(kt.exponent); // overflows to +inf, exponent retained
    return kt;
}

double case1_potential(double x) { return x - x * x * x / 3.0; }

std::pair<double, double> case_barriers() {
    // y = 0 well: V = x - x^3/3 between x = -1 and the top x = +1.
    const double dv1 = std::fabs(case1_potential(1.0) - case1_potential(-1.0));
    // y = 3 well: V = x - (x+3)^3/3 between x = -4 and x = -2; the shift by 3
    // is the symmetry image of the first well, so the barrier matches.
    auto v2 = [](double x) {
        return x - (x + 3.0) * (x + 3.0) * (x + 3.0) / 3.0;
    };
    const double dv2 = std::fabs(v2(-2.0) - v2(-4.0));
    return {dv1, dv2};
}

double case12_action_analytic() { return 16.0 / 3.0; }

ActionValue case12_action_numeric(const SystemParams& params) {
    params.validate();
    if (!(params.sigma1 > 0.0))
        throw std::invalid_argument("case12_action_numeric: sigma1 must be > 0");
    const double s2 = params.sigma1 * params.sigma1;
    const double r = params.r;

    auto rhs = [s2, r](double /*t*/, const StateN<3>& q, StateN<3>& dq) {
        const double xy = q[0] + q[2];
        dq[0] = xy * xy - 1.0 + s2 * q[1];
        dq[1] = -2.0 * xy * q[1];
        dq[2] = r * q[2] * (3.0 - q[2]);
    };
    // top of the zero-level arc in y = 0: (x, p) = (0, 2/sigma1^2)
    const StateN<3> top{0.0, 2.0 / s2, 0.0};

    OdeOptions opt;
    opt.atol = 1e-12;
    opt.rtol = 1e-10;
    opt.record = true;
    opt.h_max = 0.005;
    // a level-set drift of ~1e-12 keeps the orbit ~1e-7 away from the exit
    // fixed points, so the cut cannot be tighter than that; the tail beyond
    // 1e-6 contributes ~4e-12 to the action
    auto near_exit = [](double sign) {
        return [sign](double /*t*/, const StateN<3>& q) -> int {
            return std::fabs(q[0] - sign) < 1e-6 ? 1 : 0;
        };
    };
    auto fwd = integrate_rk45<3>(rhs, 0.0, top, 60.0, opt, nullptr, near_exit(1.0));
    auto bwd = integrate_rk45<3>(rhs, 0.0, top, -60.0, opt, nullptr, near_exit(-1.0));
    if (fwd.status != OdeStatus::stopped || bwd.status != OdeStatus::stopped)
        throw std::runtime_error("case12_action_numeric: arc integration failed");

    Trajectory<PhasePoint3> arc;
    arc.params = params;
    arc.kind = PathKind::mpp;
    for (std::size_t i = bwd.ys.size(); i-- > 1;)
        arc.push_back(bwd.ts[i], {bwd.ys[i][0], bwd.ys[i][1], bwd.ys[i][2]});
    for (std::size_t i = 0; i < fwd.ys.size(); ++i)
        arc.push_back(fwd.ts[i], {fwd.ys[i][0], fwd.ys[i][1], fwd.ys[i][2]});
    ActionValue av = normalized_action(arc, params, "case1");
    return av;
}

PowerLawFit power_law_fit(std::span<const std::pair<double, double>> sigma_tau) {
    if (sigma_tau.size() < 3)
        throw std::invalid_argument("power_law_fit: need >= 3 points");
    PowerLawFit fit;
    for (const auto& [sigma, tau] : sigma_tau) {
        if (!(sigma > 0.0 && tau > 0.0))
            throw std::invalid_argument("power_law_fit: points must be positive");
        fit.log_inv_sigma2.push_back(std::log(1.0 / (sigma * sigma)));
        fit.log_tau.push_back(std::log(tau));
    }
    const std::size_t n = fit.log_inv_sigma2.size();
    const double mx =
        std::accumulate(fit.log_inv_sigma2.begin(), fit.log_inv_sigma2.end(), 0.0) / n;
    const double my =
        std::accumulate(fit.log_tau.begin(), fit.log_tau.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = fit.log_inv_sigma2[i] - mx;
        const double dy = fit.log_tau[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0)
        throw IllConditionedError("power_law_fit: all sigma values equal");
    fit.b = sxy / sxx;
    fit.a = std::exp(my - fit.b * mx);
    fit.r_value = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 1.0;
    for (std::size_t i = 0; i < n; ++i)
        fit.residuals.push_back(fit.log_tau[i] -
                                (std::log(fit.a) + fit.b * fit.log_inv_sigma2[i]));
    return fit;
}

} // namespace tiplab
