// SPDX-License-Identifier: Apache-2.0

#include "tiplab/mpp.hpp"

#include <cmath>
#include <stdexcept>

namespace tiplab {

Vel3 mpp_field(const PhasePoint3& q, const SystemParams& params) {
    const double xy = q.x + q.y;
    const double s2 = params.sigma1 * params.sigma1;
    return {xy * xy - 1.0 + s2 * q.p, -2.0 * xy * q.p,
            params.r * q.y * (3.0 - q.y)};
}

Mat3 mpp_jacobian(const PhasePoint3& q, const SystemParams& params) {
    const double xy = q.x + q.y;
    const double s2 = params.sigma1 * params.sigma1;
    return {{{2.0 * xy, s2, 2.0 * xy},
             {-2.0 * q.p, -2.0 * xy, -2.0 * q.p},
             {0.0, 0.0, params.r * (3.0 - 2.0 * q.y)}}};
}

SaddleInfo linearize_saddle(const PhasePoint3& loc, const SystemParams& params) {
    params.validate();
    const Vel3 v = mpp_field(loc, params);
    if (std::fabs(v.dx) > 1e-9 || std::fabs(v.dp) > 1e-9 || std::fabs(v.dy) > 1e-9)
        throw std::invalid_argument("linearize_saddle: not an equilibrium");
    if (loc.p != 0.0)
        throw std::invalid_argument(
            "linearize_saddle: closed form requires a p = 0 equilibrium");

    const double a = 2.0 * (loc.x + loc.y);          // x-direction rate
    const double c = params.r * (3.0 - 2.0 * loc.y); // y-direction rate
    const double s2 = params.sigma1 * params.sigma1;
    if (std::fabs(std::fabs(c) - std::fabs(a)) < 1e-9)
        throw DegenerateError("linearize_saddle: eigenvalue collision (3r = 2)");

    SaddleInfo info;
    info.location = loc;
    info.eigenvalues = {a, -a, c};
    // triangular Jacobian: rows [a, s2, a], [0, -a, 0], [0, 0, c]
    info.eigenvectors[0] = {1.0, 0.0, 0.0};
    info.eigenvectors[1] = {-s2 / (2.0 * a), 1.0, 0.0};
    info.eigenvectors[2] = {-a / (a - c), 0.0, 1.0};
    for (const double lam : info.eigenvalues)
        (lam > 0.0 ? info.unstable_dim : info.stable_dim) += 1;
    return info;
}

double invariant_plane_hamiltonian(const PhasePoint3& q, const SystemParams& params) {
    if (std::fabs(q.y) > 1e-12 && std::fabs(q.y - 3.0) > 1e-12)
        throw OffPlaneError("invariant_plane_hamiltonian: y must be 0 or 3");
    const double xy = q.x + q.y;
    const double s2 = params.sigma1 * params.sigma1;
    return (xy * xy - 1.0) * q.p + 0.5 * s2 * q.p * q.p;
}

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& w,
                 std::size_t stride) {
    double acc = 0.0;
    std::size_t prev = 0;
    for (std::size_t i = stride; i < t.size(); i += stride) {
        acc += 0.5 * (w[prev] + w[i]) * (t[i] - t[prev]);
        prev = i;
    }
    // close the tail so both densities integrate the same span
    if (prev != t.size() - 1) {
        const std::size_t last = t.size() - 1;
        acc += 0.5 * (w[prev] + w[last]) * (t[last] - t[prev]);
    }
    return acc;
}

} // namespace

ActionValue normalized_action(const Trajectory<PhasePoint3>& path,
                              const SystemParams& params,
                              const std::string& label) {
    if (path.size() < 5)
        throw std::invalid_argument("normalized_action: too few samples");
    const double s4 = std::pow(params.sigma1, 4);
    std::vector<double> w(path.size());
    for (std::size_t i = 0; i < path.size(); ++i)
        w[i] = s4 * path.state[i].p * path.state[i].p;

    const double fine = trapezoid(path.t, w, 1);
    const double coarse = trapezoid(path.t, w, 2);
    const double est = std::fabs(fine - coarse) / 3.0;
    if (fine != 0.0 && est / std::fabs(fine) > 1e-3)
        throw UnresolvedQuadratureError(
            "normalized_action: step-halving estimate above 1e-3 relative");

    ActionValue av;
    av.value = fine;
    av.quadrature_error = est;
    av.path_label = label;
    av.params = params;
    return av;
}

double fw_action(const Trajectory<PhasePoint3>& path, const SystemParams& params) {
    const std::size_t n = path.size();
    if (n < 5) throw std::invalid_argument("fw_action: too few samples");
    if (!(params.sigma1 > 0.0))
        throw std::invalid_argument("fw_action: sigma1 must be > 0");

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        double xdot;
        if (i == 0) {
            xdot = (path.state[1].x - path.state[0].x) / (path.t[1] - path.t[0]);
        } else if (i == n - 1) {
            xdot = (path.state[n - 1].x - path.state[n - 2].x) /
                   (path.t[n - 1] - path.t[n - 2]);
        } else {
            // second-order difference on a nonuniform grid
            const double h0 = path.t[i] - path.t[i - 1];
            const double h1 = path.t[i + 1] - path.t[i];
            const double a = -h1 / (h0 * (h0 + h1));
            const double b = (h1 - h0) / (h0 * h1);
            const double c = h0 / (h1 * (h0 + h1));
            xdot = a * path.state[i - 1].x + b * path.state[i].x +
                   c * path.state[i + 1].x;
        }
        const double xy = path.state[i].x + path.state[i].y;
        const double f = xy * xy - 1.0;
        const double dev = xdot - f;
        w[i] = dev * dev;
    }
    double acc = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        acc += 0.5 * (w[i - 1] + w[i]) * (path.t[i] - path.t[i - 1]);
    return acc / (params.sigma1 * params.sigma1);
}

} // namespace tiplab
