// SPDX-License-Identifier: Apache-2.0
#pragma once

// The three-dimensional path system
//   x' = (x + y)^2 - 1 + sigma1^2 p
//   p' = -2 (x + y) p
//   y' = r y (3 - y)
// together with its saddle linearizations, the conserved quantity in the
// invariant planes y = 0 and y = 3, and the two action evaluations used to
// rank tipping routes.

#include "tiplab/types.hpp"

#include <array>
#include <string>

namespace tiplab {

using Mat3 = std::array<std::array<double, 3>, 3>;

struct Vel3 {
    double dx = 0.0;
    double dp = 0.0;
    double dy = 0.0;
};

Vel3 mpp_field(const PhasePoint3& q, const SystemParams& params);

/// Analytic Jacobian of mpp_field at an arbitrary point.
Mat3 mpp_jacobian(const PhasePoint3& q, const SystemParams& params);

struct SaddleInfo {
    PhasePoint3 location;
    std::array<double, 3> eigenvalues;
    std::array<std::array<double, 3>, 3> eigenvectors; ///< rows match eigenvalues
    int stable_dim = 0;
    int unstable_dim = 0;
};

/// Eigen-decomposition at a p = 0 equilibrium (closed form: the Jacobian is
/// triangular there). Throws DegenerateError when 3r = 2 collides the
/// eigenvalues, and std::invalid_argument off an equilibrium.
SaddleInfo linearize_saddle(const PhasePoint3& location, const SystemParams& params);

/// h = ((x + y)^2 - 1) p + (sigma1^2 / 2) p^2, conserved along orbits inside
/// y = 0 or y = 3. Throws OffPlaneError when y is not one of those planes
/// (tolerance 1e-12).
double invariant_plane_hamiltonian(const PhasePoint3& q, const SystemParams& params);

struct ActionValue {
    double value = 0.0;
    double quadrature_error = 0.0; ///< step-halving estimate, absolute
    std::string path_label;
    SystemParams params;
};

/// Normalized action  integral sigma1^4 p^2 dt  by composite trapezoid over
/// the trajectory samples. Throws UnresolvedQuadratureError when halving the
/// sample density moves the value by more than 1e-3 relative.
ActionValue normalized_action(const Trajectory<PhasePoint3>& path,
                              const SystemParams& params,
                              const std::string& label = "");

/// Path-functional route: integral (x' - f)^2 / sigma1^2 dt with x'
/// estimated from the samples by finite differences. On solutions of the
/// path system this equals normalized_action / sigma1^2.
double fw_action(const Trajectory<PhasePoint3>& path, const SystemParams& params);

} // namespace tiplab
