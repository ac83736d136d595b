// SPDX-License-Identifier: Apache-2.0

#include "tiplab/manifolds.hpp"

#include "tiplab/interp.hpp"
#include "tiplab/rk45.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace tiplab {

namespace {

struct Vec3 {
    double x, p, y;
};

double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.p * v.p + v.y * v.y); }
double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.p * b.p + a.y * b.y;
}

void check_not_supercritical(const SystemParams& params, const char* what) {
    if (params.r > kCriticalRate * (1.0 + 1e-12))
        throw SupercriticalError(std::string(what) +
                                 ": r above the critical rate 4/3");
}

/// Unit slerp arc between the two unstable eigendirections of s1 so that the
/// endpoints lie exactly on them: a = 0 on (sigma1^2/4, 1, 0), a = 1 on
/// (-2/(3r+2), 0, 1).
Vec3 arc_direction(const SystemParams& params, double a) {
    const double s2 = params.sigma1 * params.sigma1;
    if (std::fabs(3.0 * params.r - 2.0) < 1e-9)
        throw DegenerateError("seed arc: eigenvalue collision (3r = 2)");
    Vec3 v1{s2 / 4.0, 1.0, 0.0};
    Vec3 v2{-2.0 / (3.0 * params.r + 2.0), 0.0, 1.0};
    const double n1 = norm(v1), n2 = norm(v2);
    v1 = {v1.x / n1, v1.p / n1, v1.y / n1};
    v2 = {v2.x / n2, v2.p / n2, v2.y / n2};
    const double omega = std::acos(std::clamp(dot(v1, v2), -1.0, 1.0));
    const double s = std::sin(omega);
    const double w1 = std::sin((1.0 - a) * omega) / s;
    const double w2 = std::sin(a * omega) / s;
    return {w1 * v1.x + w2 * v2.x, w1 * v1.p + w2 * v2.p, w1 * v1.y + w2 * v2.y};
}

} // namespace

PhasePoint3 symmetry_map(const PhasePoint3& q) {
    return {-q.x - 3.0, q.p, 3.0 - q.y};
}

PhasePoint3 unstable_seed_at(const SystemParams& params, double radius, double a) {
    const Vec3 u = arc_direction(params, a);
    return {kSaddle1.x + radius * u.x, kSaddle1.p + radius * u.p,
            kSaddle1.y + radius * u.y};
}

PhasePoint3 stable_seed_at(const SystemParams& params, double radius, double a) {
    return symmetry_map(unstable_seed_at(params, radius, a));
}

namespace {

SeedCurve build_seed_curve(const SystemParams& params, double radius, int count,
                           bool stable) {
    params.validate();
    if (!(radius >= 1e-8 && radius <= 1e-2))
        throw std::invalid_argument("seed curve: radius out of range");
    if (count < 2) throw std::invalid_argument("seed curve: count < 2");
    SeedCurve sc;
    sc.radius = radius;
    sc.count = count;
    for (int i = 0; i < count; ++i) {
        const double a = (count == 1) ? 0.0 : (double)i / (count - 1);
        sc.angles.push_back(a);
        sc.points.push_back(stable ? stable_seed_at(params, radius, a)
                                   : unstable_seed_at(params, radius, a));
    }
    return sc;
}

} // namespace

SeedCurve seed_unstable(const SystemParams& params, double radius, int count) {
    return build_seed_curve(params, radius, count, false);
}

SeedCurve seed_stable(const SystemParams& params, double radius, int count) {
    return build_seed_curve(params, radius, count, true);
}

SectionHit shoot_to_section(const PhasePoint3& seed, const SystemParams& params,
                            ShootDir dir, const ShootOptions& opt) {
    const double r = params.r;
    const double s2 = params.sigma1 * params.sigma1;
    auto rhs = [r, s2](double /*t*/, const StateN<3>& q, StateN<3>& dq) {
        const double xy = q[0] + q[2];
        dq[0] = xy * xy - 1.0 + s2 * q[1];
        dq[1] = -2.0 * xy * q[1];
        dq[2] = r * q[2] * (3.0 - q[2]);
    };
    auto section = [](double /*t*/, const StateN<3>& q) { return q[0] + q[2]; };
    auto guard = [&opt](double /*t*/, const StateN<3>& q) -> int {
        return std::fabs(q[0]) > opt.x_guard ? 1 : 0;
    };

    OdeOptions oopt;
    oopt.atol = opt.atol;
    oopt.rtol = opt.rtol;
    oopt.record = opt.record;
    oopt.h_max = opt.h_max;
    oopt.event_tol = opt.event_tol;

    const double t1 = (dir == ShootDir::forward) ? opt.t_max : -opt.t_max;
    auto res = integrate_rk45<3>(rhs, 0.0, StateN<3>{seed.x, seed.p, seed.y}, t1,
                                 oopt, section, guard);

    SectionHit hit;
    if (opt.record) {
        hit.path.params = params;
        hit.path.kind = PathKind::mpp;
        hit.path.t = std::move(res.ts);
        hit.path.state.reserve(res.ys.size());
        for (const auto& s : res.ys)
            hit.path.state.push_back({s[0], s[1], s[2]});
    }
    if (res.status == OdeStatus::event) {
        hit.outcome = ShotOutcome::hit;
        hit.point = {res.y[0], res.y[1], res.y[2]};
        hit.t_flight = std::fabs(res.t);
    }
    return hit;
}

namespace {

struct CurveBuilder {
    const SystemParams& params;
    const SeedingConfig& cfg;
    bool stable;
    SectionCurve curve;
    int shots = 0;
    int no_cross = 0;

    SectionHit shoot_angle(double a) {
        ++shots;
        const PhasePoint3 seed =
            stable ? stable_seed_at(params, cfg.radius, a)
                   : unstable_seed_at(params, cfg.radius, a);
        SectionHit h = shoot_to_section(
            seed, params, stable ? ShootDir::backward : ShootDir::forward,
            cfg.shoot);
        if (h.outcome == ShotOutcome::no_crossing) ++no_cross;
        return h;
    }

    void add_node(double a, const SectionHit& h) {
        curve.nodes.push_back({h.point.y, h.point.p, a, h.point});
    }

    static double gap(const SectionHit& a, const SectionHit& b) {
        return std::hypot(a.point.y - b.point.y, a.point.p - b.point.p);
    }

    void refine(double a_lo, const SectionHit& h_lo, double a_hi,
                const SectionHit& h_hi, int depth) {
        if (shots >= cfg.max_shots || depth >= cfg.max_refine_depth) return;
        const bool lo_hit = h_lo.outcome == ShotOutcome::hit;
        const bool hi_hit = h_hi.outcome == ShotOutcome::hit;
        if (!lo_hit && !hi_hit) return;
        if (lo_hit && hi_hit && gap(h_lo, h_hi) <= cfg.max_gap) return;
        if (a_hi - a_lo < 1e-11) return;
        const double mid = 0.5 * (a_lo + a_hi);
        const SectionHit h_mid = shoot_angle(mid);
        if (h_mid.outcome == ShotOutcome::hit) add_node(mid, h_mid);
        refine(a_lo, h_lo, mid, h_mid, depth + 1);
        refine(mid, h_mid, a_hi, h_hi, depth + 1);
    }

    SectionCurve build() {
        curve.params = params;
        curve.source =
            stable ? CurveSource::stable_of_s2 : CurveSource::unstable_of_s1;

        std::vector<double> angles;
        std::vector<SectionHit> hits;
        for (int i = 0; i < cfg.count; ++i) {
            const double a = (double)i / (cfg.count - 1);
            angles.push_back(a);
            hits.push_back(shoot_angle(a));
            if (hits.back().outcome == ShotOutcome::hit)
                add_node(a, hits.back());
        }
        for (int i = 0; i + 1 < cfg.count; ++i)
            refine(angles[i], hits[i], angles[i + 1], hits[i + 1], 0);

        std::sort(curve.nodes.begin(), curve.nodes.end(),
                  [](const auto& a, const auto& b) { return a.angle < b.angle; });
        curve.shots = shots;
        curve.no_cross_fraction = shots > 0 ? (double)no_cross / shots : 0.0;
        if (curve.nodes.empty())
            throw NoIntersectionError("section curve: no seed reached y = -x");
        return curve;
    }
};

} // namespace

SectionCurve section_curve_unstable(const SystemParams& params,
                                    const SeedingConfig& cfg) {
    params.validate();
    check_not_supercritical(params, "section_curve_unstable");
    CurveBuilder cb{params, cfg, false, {}, 0, 0};
    return cb.build();
}

SectionCurve section_curve_stable(const SystemParams& params,
                                  const SeedingConfig& cfg,
                                  StableCurveMode mode) {
    params.validate();
    check_not_supercritical(params, "section_curve_stable");
    if (mode == StableCurveMode::backward_shooting) {
        CurveBuilder cb{params, cfg, true, {}, 0, 0};
        return cb.build();
    }
    SectionCurve mirrored = section_curve_unstable(params, cfg);
    mirrored.source = CurveSource::stable_of_s2;
    for (auto& n : mirrored.nodes) {
        n.point = symmetry_map(n.point);
        n.y = n.point.y;
        n.p = n.point.p;
    }
    return mirrored;
}

namespace {

Pchip curve_interpolant(const SectionCurve& c, const char* what) {
    std::vector<std::pair<double, double>> yp;
    yp.reserve(c.nodes.size());
    for (const auto& n : c.nodes) yp.emplace_back(n.y, n.p);
    std::sort(yp.begin(), yp.end());
    std::vector<double> ys, ps;
    for (const auto& [y, p] : yp) {
        if (!ys.empty() && y - ys.back() < 1e-9) continue;
        ys.push_back(y);
        ps.push_back(p);
    }
    if (ys.size() < 4)
        throw NoIntersectionError(std::string(what) +
                                  ": too few distinct section hits");
    return Pchip(std::move(ys), std::move(ps));
}

} // namespace

Intersection find_intersection(const SectionCurve& curve_u,
                               const SectionCurve& curve_s) {
    const Pchip pu = curve_interpolant(curve_u, "find_intersection (unstable)");
    const Pchip ps = curve_interpolant(curve_s, "find_intersection (stable)");
    const double half = 1.5;

    // At the critical rate the two curves only touch near (y, p) = (3/2, 0);
    // detect that contact before demanding a transversal crossing.
    {
        const auto& un = curve_u.nodes;
        const auto& sn = curve_s.nodes;
        const auto u_end = *std::max_element(
            un.begin(), un.end(),
            [](const auto& a, const auto& b) { return a.y < b.y; });
        const auto s_begin = *std::min_element(
            sn.begin(), sn.end(),
            [](const auto& a, const auto& b) { return a.y < b.y; });
        const bool no_overlap = u_end.y <= s_begin.y + 1e-6;
        const double contact =
            std::hypot(u_end.y - s_begin.y, u_end.p - s_begin.p);
        if (no_overlap && contact < 0.02) {
            Intersection inter;
            inter.y = 0.5 * (u_end.y + s_begin.y);
            inter.p = 0.5 * (u_end.p + s_begin.p);
            inter.point = {-inter.y, inter.p, inter.y};
            return inter;
        }
    }

    if (!(pu.x_min() < half && pu.x_max() > half))
        throw NoIntersectionError(
            "find_intersection: unstable curve does not span y = 3/2");
    if (!(ps.x_min() < half && ps.x_max() > half))
        throw NoIntersectionError(
            "find_intersection: stable curve does not span y = 3/2");

    const double lo = std::max(pu.x_min(), ps.x_min());
    const double hi = std::min(pu.x_max(), ps.x_max());
    auto diff = [&](double y) { return pu(y) - ps(y); };

    const int n_scan = 2000;
    std::vector<std::pair<double, double>> brackets;
    double y_prev = lo, d_prev = diff(lo);
    for (int i = 1; i <= n_scan; ++i) {
        const double y = lo + (hi - lo) * i / n_scan;
        const double d = diff(y);
        if (d == 0.0) brackets.emplace_back(y, y);
        else if (d_prev != 0.0 && ((d_prev < 0.0) != (d < 0.0)))
            brackets.emplace_back(y_prev, y);
        y_prev = y;
        d_prev = d;
    }
    if (brackets.empty())
        throw NoIntersectionError("find_intersection: no sign change of the "
                                  "curve gap; resolution failure");
    if (brackets.size() > 1) {
        // interpolation noise can split one crossing into a tight cluster
        const double spread = brackets.back().second - brackets.front().first;
        if (spread > 1e-3)
            throw MultipleIntersectionsError(
                "find_intersection: multiple curve crossings; resolution "
                "failure");
        brackets = {{brackets.front().first, brackets.back().second}};
    }

    auto [ya, yb] = brackets.front();
    double da = diff(ya);
    for (int it = 0; it < 200 && yb - ya > 1e-14; ++it) {
        const double ym = 0.5 * (ya + yb);
        const double dm = diff(ym);
        if (dm == 0.0) {
            ya = yb = ym;
            break;
        }
        if ((da < 0.0) != (dm < 0.0)) {
            yb = ym;
        } else {
            ya = ym;
            da = dm;
        }
    }
    Intersection inter;
    inter.y = 0.5 * (ya + yb);
    inter.p = 0.5 * (pu(inter.y) + ps(inter.y));
    inter.point = {-inter.y, inter.p, inter.y};
    return inter;
}

HeteroclinicOrbit heteroclinic(const SystemParams& params, const HetOptions& opt) {
    params.validate();
    check_not_supercritical(params, "heteroclinic");

    const SectionCurve cu = section_curve_unstable(params, opt.seeding);
    const SectionCurve cs =
        section_curve_stable(params, opt.seeding, opt.stable_mode);
    const Intersection inter = find_intersection(cu, cs);

    const double rho = opt.refine_radius;

    ShootOptions sopt = opt.seeding.shoot;
    sopt.record = false;
    sopt.t_max = std::max(sopt.t_max, 400.0);
    // the refine shots must walk the same step sequence as the recorded
    // orbit, otherwise the located hit slides along the manifold curve
    sopt.h_max = opt.record_h_max;

    auto shoot_u = [&](double a) {
        return shoot_to_section(unstable_seed_at(params, rho, a), params,
                                ShootDir::forward, sopt);
    };
    auto shoot_s = [&](double a) {
        return shoot_to_section(stable_seed_at(params, rho, a), params,
                                ShootDir::backward, sopt);
    };
    auto hit_u = [&](double a) {
        const SectionHit h = shoot_u(a);
        if (h.outcome != ShotOutcome::hit)
            throw NoIntersectionError("heteroclinic: refine shot lost the section");
        return h;
    };
    auto hit_s = [&](double a) {
        const SectionHit h = shoot_s(a);
        if (h.outcome != ShotOutcome::hit)
            throw NoIntersectionError("heteroclinic: refine shot lost the section");
        return h;
    };

    // Warm start: hit-y is monotone in the seed angle at this radius
    // (rising on the unstable side, falling on its mirror), so bisect each
    // side onto the curve intersection's y. The angle parameterization is
    // strongly compressed toward a = 0 when 3r > 2, which is why a
    // curve-based guess is not good enough here.
    auto warm_start = [&](auto&& shoot_fn, double y_target, bool rising) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const SectionHit h = shoot_fn(mid);
            if (h.outcome == ShotOutcome::hit &&
                std::fabs(h.point.y - y_target) < 1e-9)
                return mid;
            const bool overshoot =
                h.outcome != ShotOutcome::hit ||
                (rising ? h.point.y >= y_target : h.point.y <= y_target);
            (overshoot ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    };
    double au = warm_start(shoot_u, inter.y, true);
    double as = warm_start(shoot_s, inter.y, false);

    SectionHit hu = hit_u(au);
    SectionHit hs = hit_s(as);
    double res_norm = std::hypot(hu.point.y - hs.point.y, hu.point.p - hs.point.p);

    const double da = 1e-8;
    for (int it = 0; it < 24 && res_norm > opt.refine_tol; ++it) {
        const double au_fd = (au + da <= 1.0) ? au + da : au - da;
        const double as_fd = (as + da <= 1.0) ? as + da : as - da;
        const SectionHit hu1 = hit_u(au_fd);
        const SectionHit hs1 = hit_s(as_fd);
        // 2x2 Jacobian of the residual (y gap, p gap) in (au, as)
        const double j00 = (hu1.point.y - hu.point.y) / (au_fd - au);
        const double j10 = (hu1.point.p - hu.point.p) / (au_fd - au);
        const double j01 = -(hs1.point.y - hs.point.y) / (as_fd - as);
        const double j11 = -(hs1.point.p - hs.point.p) / (as_fd - as);
        const double det = j00 * j11 - j01 * j10;
        if (det == 0.0 || !std::isfinite(det))
            throw NoIntersectionError("heteroclinic: singular refine Jacobian");
        const double ry = hu.point.y - hs.point.y;
        const double rp = hu.point.p - hs.point.p;
        double step_u = -(j11 * ry - j01 * rp) / det;
        double step_s = -(-j10 * ry + j00 * rp) / det;

        double scale = 1.0;
        bool improved = false;
        for (int half = 0; half < 12; ++half) {
            const double au_try = std::clamp(au + scale * step_u, 0.0, 1.0);
            const double as_try = std::clamp(as + scale * step_s, 0.0, 1.0);
            const SectionHit hu_try = hit_u(au_try);
            const SectionHit hs_try = hit_s(as_try);
            const double rn = std::hypot(hu_try.point.y - hs_try.point.y,
                                         hu_try.point.p - hs_try.point.p);
            if (rn < res_norm) {
                au = au_try;
                as = as_try;
                hu = hu_try;
                hs = hs_try;
                res_norm = rn;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) break; // at the hit-granularity floor
    }
    if (res_norm > opt.refine_accept)
        throw NoIntersectionError(
            "heteroclinic: section matching did not converge");

    // assemble the orbit from the two matched halves, recorded densely
    ShootOptions ropt = sopt;
    ropt.record = true;
    ropt.h_max = opt.record_h_max;
    const SectionHit fwd =
        shoot_to_section(unstable_seed_at(params, rho, au), params,
                         ShootDir::forward, ropt);
    const SectionHit bwd =
        shoot_to_section(stable_seed_at(params, rho, as), params,
                         ShootDir::backward, ropt);
    if (fwd.outcome != ShotOutcome::hit || bwd.outcome != ShotOutcome::hit)
        throw NoIntersectionError("heteroclinic: recording shot lost the section");

    // walk each seed into its saddle along the manifold
    auto extend_to_saddle = [&](const PhasePoint3& seed, const PhasePoint3& saddle,
                                bool backward) {
        const double r = params.r;
        const double s2 = params.sigma1 * params.sigma1;
        auto rhs = [r, s2](double /*t*/, const StateN<3>& q, StateN<3>& dq) {
            const double xy = q[0] + q[2];
            dq[0] = xy * xy - 1.0 + s2 * q[1];
            dq[1] = -2.0 * xy * q[1];
            dq[2] = r * q[2] * (3.0 - q[2]);
        };
        const double target = 0.9 * opt.endpoint_tol;
        auto stop = [&saddle, target](double /*t*/, const StateN<3>& q) -> int {
            const PhasePoint3 pt{q[0], q[1], q[2]};
            return distance3(pt, saddle) <= target ? 1 : 0;
        };
        OdeOptions oo;
        oo.atol = 1e-12;
        oo.rtol = 1e-10;
        oo.record = true;
        oo.h_max = opt.record_h_max;
        auto res = integrate_rk45<3>(rhs, 0.0, StateN<3>{seed.x, seed.p, seed.y},
                                     backward ? -50.0 : 50.0, oo, nullptr, stop);
        if (res.status != OdeStatus::stopped)
            throw NoIntersectionError(
                "heteroclinic: saddle extension did not close");
        return res;
    };
    const auto ext_u =
        extend_to_saddle(fwd.path.state.front(), kSaddle1, true);
    const auto ext_s =
        extend_to_saddle(bwd.path.state.front(), kSaddle2, false);

    HeteroclinicOrbit orbit;
    orbit.intersection_point = fwd.point;
    orbit.y_star = fwd.point.y;
    orbit.p_star = fwd.point.p;
    orbit.angle_unstable = au;
    orbit.angle_stable = as;

    // physical time zero at the section: extension into s1, forward half,
    // reversed backward half, extension into s2
    Trajectory<PhasePoint3>& traj = orbit.trajectory;
    traj.params = params;
    traj.kind = PathKind::mpp;
    const double t1 = fwd.path.t.back();
    for (std::size_t i = ext_u.ts.size(); i-- > 1;)
        traj.push_back(ext_u.ts[i] - t1,
                       {ext_u.ys[i][0], ext_u.ys[i][1], ext_u.ys[i][2]});
    for (std::size_t i = 0; i < fwd.path.size(); ++i)
        traj.push_back(fwd.path.t[i] - t1, fwd.path.state[i]);
    const double t2 = bwd.path.t.back(); // negative
    for (std::size_t i = bwd.path.size() - 1; i-- > 0;)
        traj.push_back(bwd.path.t[i] - t2, bwd.path.state[i]);
    for (std::size_t i = 1; i < ext_s.ts.size(); ++i)
        traj.push_back(ext_s.ts[i] - t2,
                       {ext_s.ys[i][0], ext_s.ys[i][1], ext_s.ys[i][2]});

    const double d1 = distance3(traj.state.front(), kSaddle1);
    const double d2 = distance3(traj.state.back(), kSaddle2);
    if (d1 > opt.endpoint_tol || d2 > opt.endpoint_tol)
        throw NoIntersectionError("heteroclinic: endpoints not at the saddles");

    orbit.action = normalized_action(traj, params, "case3");
    return orbit;
}

} // namespace tiplab
