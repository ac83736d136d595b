// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shooting construction of the unstable manifold of s1 = (-1, 0, 0) and the
// stable manifold of s2 = (-2, 0, 3): seed arcs on the linear subspaces,
// first crossings of the section plane y = -x, the curve intersection, and
// the connecting orbit assembled through it.

#include "tiplab/mpp.hpp"
#include "tiplab/types.hpp"

#include <vector>

namespace tiplab {

/// The involution (x, p, y) -> (-x - 3, p, 3 - y); with time reversal it
/// maps the path system onto itself and swaps the two saddles.
PhasePoint3 symmetry_map(const PhasePoint3& q);

struct SeedCurve {
    std::vector<PhasePoint3> points;
    std::vector<double> angles; ///< slerp parameter in [0, 1] per point
    double radius = 0.0;
    int count = 0;
};

/// Seed at slerp parameter a in [0, 1] on the quarter-arc of radius `radius`
/// about s1 inside the unstable eigenplane; a = 0 hits the y = 0 endpoint
/// (p > 0), a = 1 the p = 0 endpoint (y > 0).
PhasePoint3 unstable_seed_at(const SystemParams& params, double radius, double a);
/// Mirror arc about s2 (p > 0, y < 3), the symmetry image of the above.
PhasePoint3 stable_seed_at(const SystemParams& params, double radius, double a);

SeedCurve seed_unstable(const SystemParams& params, double radius = 1e-3,
                        int count = 64);
SeedCurve seed_stable(const SystemParams& params, double radius = 1e-3,
                      int count = 64);

enum class ShotOutcome { hit, no_crossing };
enum class ShootDir { forward, backward };

struct ShootOptions {
    double atol = 1e-10;
    double rtol = 1e-8;
    double t_max = 200.0;
    double x_guard = 1e3;
    double event_tol = 1e-10;
    bool record = false;
    double h_max = std::numeric_limits<double>::infinity();
};

struct SectionHit {
    ShotOutcome outcome = ShotOutcome::no_crossing;
    PhasePoint3 point;     ///< first crossing of x + y = 0 (outcome == hit)
    double t_flight = 0.0; ///< unsigned time from seed to crossing
    Trajectory<PhasePoint3> path; ///< filled when options.record
};

/// Integrates the path system from `seed` (forward for the unstable side,
/// backward for the stable side) until the trajectory first meets the plane
/// y = -x, refined to |x + y| < event_tol.
SectionHit shoot_to_section(const PhasePoint3& seed, const SystemParams& params,
                            ShootDir dir, const ShootOptions& opt = {});

enum class CurveSource { unstable_of_s1, stable_of_s2 };

struct SectionCurve {
    struct Node {
        double y = 0.0;
        double p = 0.0;
        double angle = 0.0;
        PhasePoint3 point;
    };
    std::vector<Node> nodes; ///< ordered by seed angle
    CurveSource source = CurveSource::unstable_of_s1;
    SystemParams params;
    double no_cross_fraction = 0.0;
    int shots = 0;
};

struct SeedingConfig {
    double radius = 1e-3;
    int count = 64;
    double max_gap = 0.01;     ///< target spacing of adjacent hits in (y, p)
    int max_refine_depth = 28;
    int max_shots = 6000;
    ShootOptions shoot;
};

SectionCurve section_curve_unstable(const SystemParams& params,
                                    const SeedingConfig& cfg = {});

enum class StableCurveMode { symmetry, backward_shooting };

/// Stable-side curve, either as the symmetry image of the unstable curve
/// (exact, cheap) or by direct backward shooting (validation route).
SectionCurve section_curve_stable(const SystemParams& params,
                                  const SeedingConfig& cfg = {},
                                  StableCurveMode mode = StableCurveMode::symmetry);

struct Intersection {
    PhasePoint3 point;
    double y = 0.0;
    double p = 0.0;
};

/// Unique crossing of the two curves in the section plane, located by
/// bisection on the gap between their monotone-cubic p(y) interpolants.
Intersection find_intersection(const SectionCurve& curve_u,
                               const SectionCurve& curve_s);

struct HetOptions {
    SeedingConfig seeding;
    StableCurveMode stable_mode = StableCurveMode::symmetry;
    // One ulp of seed wiggle moves a section hit by roughly exp(2T) ulps, so
    // the refine radius trades endpoint closeness against achievable section
    // match; 1e-5 keeps the hit granularity near 1e-8. The orbit is then
    // extended into each saddle along the manifold.
    double refine_radius = 1e-5;
    double refine_tol = 1e-7;   ///< Newton target for the section match
    double refine_accept = 1e-4; ///< hard failure above this residual
    double endpoint_tol = 1e-6; ///< required distance to each saddle
    double record_h_max = 0.01; ///< sample spacing of the recorded orbit
};

struct HeteroclinicOrbit {
    Trajectory<PhasePoint3> trajectory; ///< time zero at the section crossing
    PhasePoint3 intersection_point;
    double y_star = 0.0;
    double p_star = 0.0;
    ActionValue action;
    double angle_unstable = 0.0; ///< refined seed angles
    double angle_stable = 0.0;
};

/// Builds the connecting orbit for r <= 4/3: section curves, curve
/// intersection, a two-angle Newton polish of the matching seeds at
/// refine_radius, and the assembled trajectory with its action.
HeteroclinicOrbit heteroclinic(const SystemParams& params,
                               const HetOptions& opt = {});

} // namespace tiplab
