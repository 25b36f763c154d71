#pragma once

#include <cmath>
#include <utility>

namespace lpv::sim {

// One RK4 step of theta'' = -(g/L) sin(theta). Fourth-order accuracy keeps
// per-frame energy drift orders of magnitude below the non-increase
// tolerance, and equilibria (sin(theta) = 0, omega = 0) are exact fixed
// points.
inline std::pair<double, double> pendulum_step(double theta, double omega, double dt, double g,
                                               double length) {
    const double c = -g / length;
    auto acc = [c](double th) { return c * std::sin(th); };
    const double k1t = omega;
    const double k1w = acc(theta);
    const double k2t = omega + 0.5 * dt * k1w;
    const double k2w = acc(theta + 0.5 * dt * k1t);
    const double k3t = omega + 0.5 * dt * k2w;
    const double k3w = acc(theta + 0.5 * dt * k2t);
    const double k4t = omega + dt * k3w;
    const double k4w = acc(theta + dt * k3t);
    return {theta + dt / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t),
            omega + dt / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w)};
}

// Mechanical energy per unit mass, zero at the pivot height.
inline double pendulum_energy(double theta, double omega, double g, double length) {
    return 0.5 * length * length * omega * omega - g * length * std::cos(theta);
}

} // namespace lpv::sim
