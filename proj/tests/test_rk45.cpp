// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tiplab/interp.hpp"
#include "tiplab/rk45.hpp"

#include <cmath>

using namespace tiplab;

TEST_CASE("rk45 tracks a smooth exact solution") {
    // y' = cos(t) y, y = exp(sin t)
    auto rhs = [](double t, const StateN<1>& y, StateN<1>& dy) {
        dy[0] = std::cos(t) * y[0];
    };
    OdeOptions opt;
    auto res = integrate_rk45<1>(rhs, 0.0, StateN<1>{1.0}, 10.0, opt);
    CHECK(res.status == OdeStatus::reached_end);
    CHECK(res.y[0] == doctest::Approx(std::exp(std::sin(10.0))).epsilon(1e-8));
}

TEST_CASE("rk45 integrates backward") {
    auto rhs = [](double, const StateN<1>& y, StateN<1>& dy) { dy[0] = y[0]; };
    auto res = integrate_rk45<1>(rhs, 0.0, StateN<1>{1.0}, -3.0, OdeOptions{});
    CHECK(res.y[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-8));
}

TEST_CASE("rk45 harmonic oscillator keeps energy") {
    auto rhs = [](double, const StateN<2>& y, StateN<2>& dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    auto res = integrate_rk45<2>(rhs, 0.0, StateN<2>{1.0, 0.0}, 50.0, OdeOptions{});
    const double energy = res.y[0] * res.y[0] + res.y[1] * res.y[1];
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(res.y[0] == doctest::Approx(std::cos(50.0)).epsilon(1e-6));
}

TEST_CASE("rk45 event location hits the root to tolerance") {
    auto rhs = [](double, const StateN<2>& y, StateN<2>& dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    // cos(t) crosses zero at pi/2
    auto ev = [](double, const StateN<2>& y) { return y[0]; };
    auto res = integrate_rk45<2>(rhs, 0.0, StateN<2>{1.0, 0.0}, 10.0, OdeOptions{}, ev);
    REQUIRE(res.status == OdeStatus::event);
    CHECK(std::fabs(res.t - M_PI / 2.0) < 1e-9);
    CHECK(std::fabs(res.y[0]) <= 1e-10);
}

TEST_CASE("rk45 stop predicate ends the run with its code") {
    auto rhs = [](double, const StateN<1>& y, StateN<1>& dy) { dy[0] = y[0]; };
    auto stop = [](double, const StateN<1>& y) { return y[0] > 5.0 ? 7 : 0; };
    auto res = integrate_rk45<1>(rhs, 0.0, StateN<1>{1.0}, 10.0, OdeOptions{},
                                 nullptr, stop);
    CHECK(res.status == OdeStatus::stopped);
    CHECK(res.stop_code == 7);
    CHECK(res.y[0] > 5.0);
}

TEST_CASE("rk45 recording respects h_max") {
    auto rhs = [](double, const StateN<1>& y, StateN<1>& dy) { dy[0] = -y[0]; };
    OdeOptions opt;
    opt.record = true;
    opt.h_max = 0.05;
    auto res = integrate_rk45<1>(rhs, 0.0, StateN<1>{1.0}, 2.0, opt);
    REQUIRE(res.ts.size() > 10);
    for (std::size_t i = 1; i < res.ts.size(); ++i)
        CHECK(res.ts[i] - res.ts[i - 1] <= 0.05 + 1e-12);
}

TEST_CASE("pchip interpolates monotone data monotonically") {
    std::vector<double> xs{0.0, 1.0, 2.0, 3.5, 5.0};
    std::vector<double> ys{0.0, 0.5, 2.0, 2.2, 4.0};
    Pchip p(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(p(xs[i]) == doctest::Approx(ys[i]).epsilon(1e-14));
    double prev = p(0.0);
    for (double x = 0.01; x <= 5.0; x += 0.01) {
        const double v = p(x);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    // clamped extrapolation
    CHECK(p(-1.0) == ys.front());
    CHECK(p(9.0) == ys.back());
}
