// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance runs: each numbered check prints one PASS/FAIL line.
// The Monte Carlo distribution cells dominate the runtime (tens of minutes
// at desk scale); progress goes to stdout as they complete.

#include "tiplab/dynamics.hpp"
#include "tiplab/kern/kernels.hpp"
#include "tiplab/manifolds.hpp"
#include "tiplab/mpp.hpp"
#include "tiplab/rk45.hpp"
#include "tiplab/sde.hpp"
#include "tiplab/stats.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace tiplab;
using clock_t_ = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double seconds_since(clock_t_::time_point t0) {
    return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

constexpr std::uint64_t kSeed = 20250810;

// --- shared Monte Carlo cells ----------------------------------------------

struct Cell {
    TipDistribution dist;
    bool no_escapes = false;
};

Cell run_cell(double r, double sigma, double dt) {
    SimConfig base;
    base.params = {r, sigma};
    base.dt = dt;
    base.seed = kSeed;
    base.threads = 0;
    base.n_realizations = 3000;

    // pilot-run the tipping probability so the doubling protocol starts at a
    // batch size it can finish from
    SimConfig pilot = base;
    pilot.seed = base.seed ^ 0xD1B54A32D192ED03ull;
    pilot.n_realizations = 4000;
    int tipped = 0;
    for (int tries = 0; tries < 4; ++tries) {
        const EnsembleResult er = run_ensemble(pilot);
        tipped = er.m_tipped;
        if (tipped >= 25 || pilot.n_realizations >= 64000) break;
        pilot.n_realizations *= 4;
        pilot.stream_offset += 1000000;
    }
    Cell cell;
    if (tipped == 0) {
        cell.no_escapes = true;
        return cell;
    }
    const double p_hat = (double)tipped / pilot.n_realizations;
    const long n0 = (long)std::ceil(9000.0 / p_hat);
    base.n_realizations = (int)std::min<long>(
        std::max<long>(base.n_realizations, n0), 20000000L);

    const auto t0 = clock_t_::now();
    try {
        cell.dist = converge_tip_distribution(base, 6);
    } catch (const NoEscapesError&) {
        cell.no_escapes = true;
        return cell;
    }
    std::printf("  cell r=%.2f sigma=%.2f dt=%g: mean=%.3f err=%.3f ks_p=%.3f "
                "rounds=%d N=%ld (%.0f s)\n",
                r, sigma, dt, cell.dist.expected_time, cell.dist.err,
                cell.dist.ks_p, cell.dist.rounds, cell.dist.total_realizations,
                seconds_since(t0));
    std::fflush(stdout);
    return cell;
}

std::map<std::pair<double, double>, Cell> g_cells_fine; // dt = 1e-3
std::map<std::pair<double, double>, Cell> g_cells_fit;  // dt = 2e-3

const Cell& cell_fine(double r, double s) {
    auto key = std::make_pair(r, s);
    auto it = g_cells_fine.find(key);
    if (it == g_cells_fine.end())
        it = g_cells_fine.emplace(key, run_cell(r, s, 1e-3)).first;
    return it->second;
}

const Cell& cell_fit(double r, double s) {
    auto key = std::make_pair(r, s);
    auto it = g_cells_fit.find(key);
    if (it == g_cells_fit.end())
        it = g_cells_fit.emplace(key, run_cell(r, s, 2e-3)).first;
    return it->second;
}

std::map<std::pair<double, double>, HeteroclinicOrbit> g_orbits;

const HeteroclinicOrbit& orbit(double r, double s) {
    auto key = std::make_pair(r, s);
    auto it = g_orbits.find(key);
    if (it == g_orbits.end()) it = g_orbits.emplace(key, heteroclinic({r, s})).first;
    return it->second;
}

// --- criteria ---------------------------------------------------------------

void criterion_1() {
    const auto t0 = clock_t_::now();
    bool ok = true;
    std::string detail;
    try {
        const auto res = find_critical_rate(1.0, 2.0, 1e-3);
        const double wall = seconds_since(t0);
        ok = std::fabs(res.r_est - 4.0 / 3.0) < 1e-3 && wall < 10.0;
        detail = fmt("r_est=%.5f, |err|=%.2e, %.2f s", res.r_est,
                     std::fabs(res.r_est - 4.0 / 3.0), wall);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(1, ok, "critical-rate bisection reproduces 4/3", detail);
}

void criterion_2() {
    bool ok = true;
    double worst = 0.0, slowest = 0.0;
    std::string detail;
    try {
        for (const double r : {0.5, 0.75, 1.0, 1.1}) {
            for (const double s : {0.15, 0.25}) {
                const auto t0 = clock_t_::now();
                const SystemParams params{r, s};
                const SectionCurve cu = section_curve_unstable(params);
                const SectionCurve cs = section_curve_stable(
                    params, {}, StableCurveMode::backward_shooting);
                const Intersection inter = find_intersection(cu, cs);
                const double wall = seconds_since(t0);
                worst = std::max(worst, std::fabs(inter.y - 1.5));
                slowest = std::max(slowest, wall);
                ok = ok && std::fabs(inter.y - 1.5) < 1e-6 && wall < 60.0;
            }
        }
        detail = fmt("8 pairs, worst |y*-1.5|=%.2e, slowest %.1f s", worst,
                     slowest);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(2, ok, "manifold intersection sits at y = 3/2", detail);
}

void criterion_3() {
    bool ok = true;
    std::string detail;
    try {
        const std::vector<std::pair<double, double>> table{
            {1.1, 0.023}, {1.0, 0.054}, {0.75, 0.226}, {0.5, 0.684}};
        double worst_rel = 0.0;
        for (const auto& [r, expect] : table) {
            const double got = orbit(r, 0.15).action.value;
            const double rel = std::fabs(got - expect) / expect;
            worst_rel = std::max(worst_rel, rel);
            ok = ok && rel < 0.05;
        }
        double amin = 1e9, amax = -1e9;
        for (const double s : {0.1, 0.15, 0.25}) {
            const double a = orbit(1.0, s).action.value;
            amin = std::min(amin, a);
            amax = std::max(amax, a);
        }
        const double spread = (amax - amin) / amax;
        ok = ok && spread < 1e-3;
        detail = fmt("worst rel err %.3f, sigma spread %.2e", worst_rel, spread);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(3, ok, "case-3 actions match the table and are sigma-free", detail);
}

void criterion_4() {
    bool ok = true;
    std::string detail;
    try {
        const ActionValue av = case12_action_numeric({1.0, 0.2});
        const double err = std::fabs(av.value - 16.0 / 3.0);
        ok = err < 1e-3;
        detail = fmt("quadrature %.6f vs 16/3, |err|=%.2e", av.value, err);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(4, ok, "invariant-plane action equals 16/3", detail);
}

EnsembleResult g_fig_ensemble;

void criterion_5() {
    SimConfig cfg;
    cfg.params = {1.0, 0.15};
    cfg.n_realizations = 3000;
    cfg.dt = 1e-3;
    cfg.t0 = 0.0;
    cfg.t1 = 30.0;
    cfg.seed = kSeed;
    cfg.store_paths = true;
    const auto t0 = clock_t_::now();
    g_fig_ensemble = run_ensemble(cfg);
    const double frac = (double)g_fig_ensemble.m_tipped / g_fig_ensemble.n;
    const bool ok = frac >= 0.050 && frac <= 0.078;
    report(5, ok, "tipping fraction at N=3000, r=1, sigma=0.15",
           fmt("M=%d, M/N=%.4f, %.1f s", g_fig_ensemble.m_tipped, frac,
               seconds_since(t0)));
}

void criterion_6() {
    bool ok = true;
    std::string detail;
    try {
        const auto& orb = orbit(1.0, 0.15);
        // x(y) interpolant of the connecting orbit
        std::vector<double> oy, ox;
        for (const auto& s : orb.trajectory.state) {
            if (!oy.empty() && s.y <= oy.back()) continue;
            oy.push_back(s.y);
            ox.push_back(s.x);
        }
        auto x_of_y = [&](double y) {
            const auto it = std::lower_bound(oy.begin(), oy.end(), y);
            std::size_t i = (std::size_t)(it - oy.begin());
            if (i == 0) i = 1;
            if (i >= oy.size()) i = oy.size() - 1;
            const double w = (y - oy[i - 1]) / (oy[i] - oy[i - 1]);
            return ox[i - 1] + w * (ox[i] - ox[i - 1]);
        };

        const ModePath tipped = mode_path(g_fig_ensemble, PathSubset::tipped);
        double worst_tip = 0.0;
        int counted = 0;
        for (std::size_t i = 0; i < tipped.t.size(); ++i) {
            if (tipped.y[i] < 0.5 || tipped.y[i] > 2.5) continue;
            worst_tip = std::max(worst_tip,
                                 std::fabs(tipped.x_mode[i] - x_of_y(tipped.y[i])));
            ++counted;
        }
        ok = ok && counted > 20 && worst_tip < 0.2;

        // tracked modes against the pullback trajectory as a curve in (y, x):
        // conditioning on not tipping advances the relaxation by a fraction
        // of a time unit, so an x-at-matched-t comparison only measures that
        // parameterization lag where the curve runs vertical
        const ModePath tracked = mode_path(g_fig_ensemble, PathSubset::tracked);
        DetOptions dopt;
        dopt.h_max = 0.01;
        dopt.track_radius = 1e-9;
        const DetRun det = integrate_deterministic(
            {-1.0, 2.80729e-13}, {1.0, 0.0}, 0.0, 30.0, dopt);
        double worst_track = 0.0;
        for (std::size_t i = 0; i < tracked.t.size(); ++i) {
            double best = 1e300;
            for (std::size_t k = 0; k < det.trajectory.size(); ++k) {
                const double dyy = tracked.y[i] - det.trajectory.state[k].y;
                const double dxx = tracked.x_mode[i] - det.trajectory.state[k].x;
                best = std::min(best, std::hypot(dyy, dxx));
            }
            worst_track = std::max(worst_track, best);
        }
        ok = ok && worst_track < 0.1;
        detail = fmt("tipped dev %.3f (<0.2, %d pts), tracked dev %.3f (<0.1)",
                     worst_tip, counted, worst_track);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(6, ok, "ensemble modes follow the orbit and the pullback", detail);
}

void criterion_7() {
    bool ok = true;
    std::string detail;
    try {
        struct Row {
            double r, lo, hi;
        };
        const std::vector<Row> rows{{0.75, 13.0, 14.0},
                                    {0.85, 11.5, 12.5},
                                    {1.0, 9.7, 10.5},
                                    {1.1, 8.6, 9.5}};
        const double sigma = 0.25;
        std::vector<double> means;
        for (const auto& row : rows) {
            const Cell& cell = cell_fine(row.r, sigma);
            if (cell.no_escapes || !cell.dist.converged) {
                ok = false;
                means.push_back(std::nan(""));
                continue;
            }
            means.push_back(cell.dist.expected_time);
            ok = ok && cell.dist.expected_time >= row.lo - 0.5 &&
                 cell.dist.expected_time <= row.hi + 0.5 &&
                 cell.dist.err < 0.1 && cell.dist.ks_p >= 0.05;
        }
        for (std::size_t i = 0; i + 1 < means.size(); ++i)
            ok = ok && means[i] > means[i + 1];
        detail = fmt("means %.2f > %.2f > %.2f > %.2f at sigma=0.25", means[0],
                     means[1], means[2], means[3]);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(7, ok, "expected tip times land in the table rows, decreasing in r",
           detail);
}

double g_b_r1 = std::nan("");

void criterion_8() {
    bool ok = true;
    std::string detail;
    try {
        auto fit_for = [&](double r, const std::vector<double>& sigmas) {
            std::vector<std::pair<double, double>> pts;
            for (const double s : sigmas) {
                const Cell& cell = cell_fit(r, s);
                if (cell.no_escapes || !cell.dist.converged) {
                    ok = false;
                    continue;
                }
                pts.emplace_back(s, cell.dist.expected_time);
            }
            return power_law_fit(pts);
        };
        const PowerLawFit f1 = fit_for(1.0, {0.25, 0.2, 0.15, 0.1, 0.08});
        const PowerLawFit f2 = fit_for(0.75, {0.3, 0.25, 0.2, 0.15});
        g_b_r1 = f1.b;
        const double half_action = orbit(1.0, 0.15).action.value / 2.0;
        ok = ok && std::fabs(f1.b - 0.027) <= 0.01 &&
             std::fabs(f2.b - 0.021) <= 0.01 &&
             std::fabs(f1.b - half_action) <= 0.01;
        detail = fmt("b(r=1)=%.4f (a=%.2f), b(r=0.75)=%.4f (a=%.2f), "
                     "half-action=%.4f",
                     f1.b, f1.a, f2.b, f2.a, half_action);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(8, ok, "power-law exponents match the log-log fits", detail);
}

void criterion_9() {
    bool ok = true;
    double min_kramers = 1e300, min_sep = 1e300;
    for (double s = 0.08; s <= 0.3 + 1e-12; s += 0.01) {
        const double kt = kramers_time(4.0 / 3.0, s).value;
        min_kramers = std::min(min_kramers, kt);
        ok = ok && kt > 1e12;
    }
    for (const auto& [key, cell] : g_cells_fine) {
        if (cell.no_escapes || !cell.dist.converged) continue;
        const double kt = kramers_time(4.0 / 3.0, key.second).value;
        min_sep = std::min(min_sep, kt / cell.dist.expected_time);
    }
    ok = ok && min_sep >= 1e10;
    report(9, ok, "invariant-plane escapes are slower by 10 orders",
           fmt("min exp(8/(3s^2))=%.2e, min separation %.2e", min_kramers,
               min_sep));
}

void criterion_10() {
    bool ok = true;
    std::vector<std::string> fails;

    // analytic Jacobian vs finite differences
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> ux(-5.0, 2.0), up(-3.0, 8.0),
            uy(-0.5, 3.5);
        const SystemParams params{1.05, 0.21};
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const PhasePoint3 q{ux(rng), up(rng), uy(rng)};
            const Mat3 jac = mpp_jacobian(q, params);
            const double h = 1e-6;
            for (int col = 0; col < 3; ++col) {
                PhasePoint3 qp = q, qm = q;
                (col == 0 ? qp.x : col == 1 ? qp.p : qp.y) += h;
                (col == 0 ? qm.x : col == 1 ? qm.p : qm.y) -= h;
                const Vel3 fp = mpp_field(qp, params), fm = mpp_field(qm, params);
                const double fd[3] = {(fp.dx - fm.dx) / (2 * h),
                                      (fp.dp - fm.dp) / (2 * h),
                                      (fp.dy - fm.dy) / (2 * h)};
                for (int row = 0; row < 3; ++row)
                    worst = std::max(worst, std::fabs(jac[row][col] - fd[row]));
            }
        }
        if (worst > 1e-6) {
            ok = false;
            fails.push_back("jacobian");
        }
    }

    // invariant-plane conservation
    {
        const SystemParams params{1.0, 0.25};
        const double s2 = params.sigma1 * params.sigma1;
        auto rhs = [&](double, const StateN<3>& q, StateN<3>& dq) {
            const Vel3 v = mpp_field({q[0], q[1], q[2]}, params);
            dq[0] = v.dx;
            dq[1] = v.dp;
            dq[2] = v.dy;
        };
        OdeOptions opt;
        opt.record = true;
        opt.h_max = 0.05;
        auto res = integrate_rk45<3>(rhs, 0.0, StateN<3>{0.0, 1.5 / s2, 0.0}, 10.0,
                                     opt);
        const double h0 =
            invariant_plane_hamiltonian({0.0, 1.5 / s2, 0.0}, params);
        double drift = 0.0;
        bool in_plane = true;
        for (const auto& s : res.ys) {
            in_plane = in_plane && s[2] == 0.0;
            drift = std::max(drift, std::fabs(invariant_plane_hamiltonian(
                                        {s[0], s[1], s[2]}, params) -
                                    h0));
        }
        if (!(in_plane && drift < 1e-8 * std::fabs(h0))) {
            ok = false;
            fails.push_back("hamiltonian-drift");
        }
    }

    // p = 0 restriction and symmetry identity at machine precision
    {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> ux(-4.5, 1.5), up(0.0, 8.0),
            uy(0.0, 3.0);
        const SystemParams params{0.95, 0.17};
        bool plane_ok = true, sym_ok = true;
        for (int k = 0; k < 300; ++k) {
            const double x = ux(rng), y = uy(rng);
            const Vel3 v3 = mpp_field({x, 0.0, y}, params);
            const Vel2 v2 = drift2({x, y}, params.r);
            plane_ok = plane_ok && v3.dx == v2.dx && v3.dp == 0.0 &&
                       v3.dy == v2.dy;
            plane_ok = plane_ok && drift2({x, 0.0}, params.r).dy == 0.0 &&
                       drift2({x, 3.0}, params.r).dy == 0.0;
            const PhasePoint3 q{x, up(rng), y};
            const Vel3 f = mpp_field(q, params);
            const Vel3 g2 = mpp_field(symmetry_map(q), params);
            sym_ok = sym_ok && std::fabs(g2.dx - f.dx) < 1e-12 &&
                     std::fabs(g2.dp + f.dp) < 1e-12 &&
                     std::fabs(g2.dy - f.dy) < 1e-12;
        }
        if (!plane_ok) {
            ok = false;
            fails.push_back("plane-invariance");
        }
        if (!sym_ok) {
            ok = false;
            fails.push_back("symmetry-identity");
        }
    }

    // self-symmetry of the connecting orbit
    {
        const auto& orb = orbit(1.0, 0.15);
        const auto& tr = orb.trajectory;
        auto state_at = [&tr](double t) {
            const auto it = std::lower_bound(tr.t.begin(), tr.t.end(), t);
            std::size_t i = (std::size_t)(it - tr.t.begin());
            if (i == 0) i = 1;
            if (i >= tr.size()) i = tr.size() - 1;
            const double w = (t - tr.t[i - 1]) / (tr.t[i] - tr.t[i - 1]);
            const auto& a = tr.state[i - 1];
            const auto& b = tr.state[i];
            return PhasePoint3{a.x + w * (b.x - a.x), a.p + w * (b.p - a.p),
                               a.y + w * (b.y - a.y)};
        };
        const double half = std::min(-tr.t.front(), tr.t.back()) - 0.5;
        double worst = 0.0;
        for (double t = 0.0; t <= half; t += 0.2) {
            const PhasePoint3 f = state_at(t);
            const PhasePoint3 m = symmetry_map(state_at(-t));
            worst = std::max({worst, std::fabs(f.x - m.x), std::fabs(f.p - m.p),
                              std::fabs(f.y - m.y)});
        }
        if (worst > 1e-5) {
            ok = false;
            fails.push_back("orbit-self-symmetry");
        }
    }

    // strong order of the stochastic stepper
    {
        const SystemParams params{0.9, 0.1};
        const double dt_ref = 1e-5;
        const long n_ref = 500000;
        std::vector<double> z(n_ref);
        kern::fill_normals(kSeed, 0, 0, (int)n_ref, z.data());
        auto run_at = [&](long factor) {
            const double dt = dt_ref * factor;
            double x = -1.0, yv = 2.80729e-13;
            auto f = [&](double v) { return params.r * v * (3.0 - v); };
            for (long i = 0; i < n_ref / factor; ++i) {
                double dw = 0.0;
                for (long k = 0; k < factor; ++k)
                    dw += std::sqrt(dt_ref) * z[i * factor + k];
                x = em_step(x, yv, params, dt, dw);
                const double k1 = f(yv), k2 = f(yv + 0.5 * dt * k1),
                             k3 = f(yv + 0.5 * dt * k2), k4 = f(yv + dt * k3);
                yv += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            }
            return x;
        };
        const double ref = run_at(1);
        const double e2 = std::fabs(run_at(1000) - ref);
        const double e4 = std::fabs(run_at(10) - ref);
        const double slope = std::log(e2 / e4) / std::log(100.0);
        if (!(slope > 0.7 && slope < 1.3)) {
            ok = false;
            fails.push_back(fmt("strong-order(slope=%.2f)", slope));
        }
    }

    // bitwise ensemble reproducibility
    {
        SimConfig cfg;
        cfg.params = {1.0, 0.2};
        cfg.n_realizations = 64;
        cfg.seed = kSeed;
        cfg.threads = 1;
        const EnsembleResult a = run_ensemble(cfg);
        cfg.threads = 2;
        const EnsembleResult b = run_ensemble(cfg);
        bool same = a.m_tipped == b.m_tipped;
        for (int i = 0; i < a.n && same; ++i)
            same = std::memcmp(&a.x_final[i], &b.x_final[i], 8) == 0 &&
                   std::memcmp(&a.first_passage[i], &b.first_passage[i], 8) == 0;
        if (!same) {
            ok = false;
            fails.push_back("reproducibility");
        }
    }

    std::string detail = "jacobian, hamiltonian, invariance, symmetry, "
                         "self-symmetry, strong-order, reproducibility";
    if (!fails.empty()) {
        detail = "failed:";
        for (const auto& f : fails) detail += " " + f;
    }
    report(10, ok, "property suites", detail);
}

} // namespace

int main() {
    const auto t0 = clock_t_::now();
    std::printf("acceptance run, seed %llu, %s kernels\n",
                (unsigned long long)kSeed,
                kern::active_simd() == kern::SimdLevel::avx2 ? "avx2" : "scalar");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d/10 criteria passed in %.0f s\n", 10 - g_failures,
                seconds_since(t0));
    return g_failures == 0 ? 0 : 1;
}
