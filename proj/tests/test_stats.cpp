// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tiplab/kern/kernels.hpp"
#include "tiplab/stats.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace tiplab;

TEST_CASE("linear-interpolation quantiles and the 1..8 bin example") {
    const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8};
    CHECK(quantile_linear(s, 0.25) == doctest::Approx(2.75).epsilon(1e-15));
    CHECK(quantile_linear(s, 0.75) == doctest::Approx(6.25).epsilon(1e-15));
    CHECK(interquartile_range(s) == doctest::Approx(3.5).epsilon(1e-15));

    const auto edges = fd_bin_edges(s);
    // width 2 * 3.5 * 8^(-1/3) = 3.5, range 7 -> 2 bins
    REQUIRE(edges.size() == 3);
    CHECK(edges[0] == 1.0);
    CHECK(edges[1] == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(edges[2] == 8.0);
}

TEST_CASE("bin width scales as n^(-1/3) at fixed IQR") {
    auto linspace = [](int n) {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = (double)i / (n - 1);
        return v;
    };
    const auto e1 = fd_bin_edges(linspace(200));
    const auto e8 = fd_bin_edges(linspace(1600));
    const double w1 = e1[1] - e1[0];
    const double w8 = e8[1] - e8[0];
    // equally spaced grids keep IQR = 1/2 exactly, so widths halve
    const int b1 = (int)e1.size() - 1;
    const int b8 = (int)e8.size() - 1;
    CHECK(b8 == 2 * b1);
    CHECK(w8 == doctest::Approx(w1 / 2.0).epsilon(1e-12));

    CHECK_THROWS_AS((void)fd_bin_edges(std::vector<double>(16, 3.0)),
                    DegenerateBinsError);
    CHECK_THROWS_AS((void)fd_bin_edges(std::vector<double>{1.0, 2.0}),
                    DegenerateBinsError);
}

TEST_CASE("kde mode base cases") {
    CHECK_THROWS_AS((void)kde_mode(std::vector<double>(10, 1.0)),
                    InsufficientSamplesError);
    CHECK(kde_mode(std::vector<double>(64, 2.5)) == 2.5);

    // the mode of one 10^4 draw jitters at the 0.1 level; average over seeds
    std::vector<double> z(10000);
    double mode_mean = 0.0;
    const int n_seeds = 25;
    for (int seed = 0; seed < n_seeds; ++seed) {
        kern::fill_normals(2024, seed, 0, (int)z.size(), z.data());
        mode_mean += kde_mode(z);
    }
    mode_mean /= n_seeds;
    CHECK(std::fabs(mode_mean) < 0.05);

    // translation equivariance
    kern::fill_normals(2024, 1, 0, (int)z.size(), z.data());
    const double m = kde_mode(z);
    std::vector<double> shifted = z;
    for (auto& v : shifted) v += 11.25;
    CHECK(kde_mode(shifted) == doctest::Approx(m + 11.25).epsilon(1e-6));

    // bimodal mixture: the heavier peak wins
    std::vector<double> mix;
    mix.reserve(10000);
    for (int i = 0; i < 8000; ++i) mix.push_back(0.1 * z[i]);
    for (int i = 8000; i < 10000; ++i) mix.push_back(3.0 + 0.1 * z[i]);
    CHECK(std::fabs(kde_mode(mix)) < 0.05);
}

TEST_CASE("two-sample ks test separates shifted data") {
    std::vector<double> a(800), b(800), c(800);
    kern::fill_normals(5, 0, 0, 800, a.data());
    kern::fill_normals(5, 1, 0, 800, b.data());
    kern::fill_normals(5, 2, 0, 800, c.data());
    for (auto& v : c) v += 0.5;
    CHECK(ks_two_sample(a, b).p_value > 0.05);
    CHECK(ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("kramers escape times") {
    const KramersTime kt = kramers_time(4.0 / 3.0, 0.3);
    CHECK(kt.exponent == doctest::Approx(8.0 / (3.0 * 0.09)).epsilon(1e-14));
    CHECK(kt.value == doctest::Approx(std::exp(8.0 / 0.27)).epsilon(1e-12));
    CHECK(kt.value > 1e12);

    CHECK(kramers_time(0.0, 0.5).value == 1.0);

    const KramersTime huge = kramers_time(4.0 / 3.0, 0.01);
    CHECK(std::isinf(huge.value));
    CHECK(huge.exponent == doctest::Approx(2.0 * (4.0 / 3.0) / 1e-4));
}

TEST_CASE("kramers asymptotics against a brute-force escape at large noise") {
    // dx = (x^2 - 1) dt + sigma dW from the well at -1 to the barrier at +1
    const double sigma = 0.7;
    const double pred = kramers_time(4.0 / 3.0, sigma).value;
    const double dt = 5e-3;
    const int n_paths = 200;
    std::mt19937_64 rng(77);
    std::normal_distribution<double> nd(0.0, 1.0);
    double total = 0.0;
    for (int i = 0; i < n_paths; ++i) {
        double x = -1.0, t = 0.0;
        while (x < 1.0 && t < 1e5) {
            x += (x * x - 1.0) * dt + sigma * std::sqrt(dt) * nd(rng);
            t += dt;
        }
        total += t;
    }
    const double mc = total / n_paths;
    CHECK(mc / pred > 0.1);
    CHECK(mc / pred < 10.0);
}

TEST_CASE("case barriers are both 4/3") {
    const auto [dv1, dv2] = case_barriers();
    CHECK(dv1 == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(dv2 == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    // quadrature oracle: barrier = integral of (1 - x^2) over [-1, 1]
    double acc = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x0 = -1.0 + 2.0 * i / n, x1 = -1.0 + 2.0 * (i + 1) / n;
        acc += 0.5 * ((1 - x0 * x0) + (1 - x1 * x1)) * (x1 - x0);
    }
    CHECK(dv1 == doctest::Approx(acc).epsilon(1e-7));
}

TEST_CASE("invariant-plane escape action: quadrature meets the closed form") {
    CHECK(case12_action_analytic() == doctest::Approx(16.0 / 3.0).epsilon(1e-15));
    for (const double sigma : {0.15, 0.3}) {
        const ActionValue av = case12_action_numeric({1.0, sigma});
        CHECK(std::fabs(av.value - 16.0 / 3.0) < 1e-3);
    }
}

TEST_CASE("power-law fit recovers exact synthetic data") {
    std::vector<std::pair<double, double>> pts;
    const double a = 9.14, b = 0.027;
    for (const double s : {0.25, 0.2, 0.15, 0.1, 0.08})
        pts.emplace_back(s, a * std::pow(1.0 / (s * s), b));
    const PowerLawFit fit = power_law_fit(pts);
    CHECK(fit.a == doctest::Approx(a).epsilon(1e-12));
    CHECK(fit.b == doctest::Approx(b).epsilon(1e-10));
    CHECK(fit.r_value == doctest::Approx(1.0).epsilon(1e-12));
    for (const double r : fit.residuals) CHECK(std::fabs(r) < 1e-12);

    std::vector<std::pair<double, double>> flat{{0.2, 5.0}, {0.2, 6.0}, {0.2, 7.0}};
    CHECK_THROWS_AS((void)power_law_fit(flat), IllConditionedError);
    CHECK_THROWS_AS(
        (void)power_law_fit(std::vector<std::pair<double, double>>{{0.1, 1.0}}),
        std::invalid_argument);
}

TEST_CASE("convergence protocol is reproducible and flags no escapes") {
    SimConfig cfg;
    cfg.params = {1.1, 0.25};
    cfg.n_realizations = 400;
    cfg.seed = 31;
    cfg.threads = 2;
    const TipDistribution a = converge_tip_distribution(cfg, 2);
    const TipDistribution b = converge_tip_distribution(cfg, 2);
    CHECK(a.converged == b.converged);
    CHECK(a.rounds == b.rounds);
    CHECK(a.expected_time == b.expected_time);
    CHECK(a.err == b.err);
    CHECK(a.samples.size() == b.samples.size());
    CHECK(a.expected_time > 5.0);
    CHECK(a.expected_time < 15.0);

    SimConfig quiet = cfg;
    quiet.params = {1.0, 0.05};
    quiet.n_realizations = 300;
    CHECK_THROWS_AS((void)converge_tip_distribution(quiet, 1), NoEscapesError);
}

TEST_CASE("mode paths need stored paths and enough members") {
    SimConfig cfg;
    cfg.params = {1.0, 0.2};
    cfg.n_realizations = 600;
    cfg.seed = 12;
    cfg.store_paths = true;
    cfg.threads = 2;
    const EnsembleResult er = run_ensemble(cfg);
    REQUIRE(er.m_tipped >= 30);

    const ModePath tipped = mode_path(er, PathSubset::tipped);
    CHECK(tipped.t.size() > 100);
    for (std::size_t i = 0; i < tipped.t.size(); ++i) {
        CHECK(tipped.y[i] >= 0.0);
        CHECK(tipped.y[i] <= 3.0);
    }

    const ModePath tracked = mode_path(er, PathSubset::tracked);
    // early on every path hugs the base state
    CHECK(std::fabs(tracked.x_mode.front() + 1.0) < 0.1);

    SimConfig tiny = cfg;
    tiny.n_realizations = 20;
    const EnsembleResult small_er = run_ensemble(tiny);
    CHECK_THROWS_AS((void)mode_path(small_er, PathSubset::tipped),
                    InsufficientSamplesError);

    SimConfig nopaths = cfg;
    nopaths.store_paths = false;
    const EnsembleResult np = run_ensemble(nopaths);
    CHECK_THROWS_AS((void)mode_path(np, PathSubset::tipped),
                    std::invalid_argument);
}
