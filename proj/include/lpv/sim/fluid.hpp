#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "lpv/core/error.hpp"
#include "lpv/core/math.hpp"
#include "lpv/sim/types.hpp"

namespace lpv::sim {

struct FluidParams {
    double gravity = 9.81;
    Vec3 forcing;                  // scenario-level driving acceleration
    double kernel_radius = 0.09;   // interaction radius
    double rest_density = 14.0;    // in kernel-weight units
    double stiffness = 0.25;       // pressure response
    double near_stiffness = 0.6;   // anti-clustering pressure
    double viscosity = 0.18;       // XSPH velocity smoothing in [0,1)
    double cohesion = 0.45;        // scales negative (tensile) pressure
};

// Axis-aligned open tank; coordinates outside are clamped back in.
// Obstacles are solid AABBs particles are pushed out of.
struct FluidBounds {
    Vec3 lo{-0.5, 0.0, -0.5};
    Vec3 hi{0.5, 10.0, 0.5};
    std::vector<std::pair<Vec3, Vec3>> obstacles;
};

struct FluidStepHooks {
    Vec3 extra_accel;                        // AntiGravity
    double viscosity_override = -2.0;        // > -2 replaces viscosity (may be negative)
    double self_attraction = 0.0;            // radial pull toward the centroid
    const std::vector<int>* cluster_of = nullptr; // fragmentation phases
    Vec3 cluster_drift;                      // per-cluster alternating drift
};

namespace detail {

// Uniform-grid neighbor search with deterministic iteration order.
class FluidGrid {
public:
    FluidGrid(const std::vector<Vec3>& pos, double cell) : cell_(cell) {
        for (std::size_t i = 0; i < pos.size(); ++i)
            cells_[key(pos[i])].push_back(static_cast<int>(i));
    }

    template <typename Fn>
    void for_neighbors(const Vec3& p, Fn&& fn) const {
        const std::int64_t cx = coord(p.x), cy = coord(p.y), cz = coord(p.z);
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    auto it = cells_.find(pack(cx + dx, cy + dy, cz + dz));
                    if (it == cells_.end()) continue;
                    for (int j : it->second) fn(j);
                }
    }

private:
    std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    std::int64_t pack(std::int64_t x, std::int64_t y, std::int64_t z) const {
        return ((x & 0x1fffff) << 42) | ((y & 0x1fffff) << 21) | (z & 0x1fffff);
    }
    std::int64_t key(const Vec3& p) const { return pack(coord(p.x), coord(p.y), coord(p.z)); }

    double cell_;
    std::map<std::int64_t, std::vector<int>> cells_;
};

} // namespace detail

// One substep of a position-based fluid in the double-density-relaxation
// style: ballistic advance, pairwise density relaxation inside the kernel
// radius, XSPH viscosity smoothing, and boundary clamping. The particle
// count never changes here.
inline void step_fluid(FluidState& f, double h, const FluidParams& p, const FluidBounds& bounds,
                       const FluidStepHooks& hooks = {}) {
    const std::size_t n = f.pos.size();
    if (n == 0) throw UnstableSimulation("fluid: empty particle set");
    const double hr = p.kernel_radius;

    Vec3 centroid{0, 0, 0};
    if (hooks.self_attraction != 0.0) {
        for (const Vec3& q : f.pos) centroid += q;
        centroid = centroid / static_cast<double>(n);
    }

    // Accelerations (gravity, forcing, hooks) and the velocity kick.
    std::vector<Vec3> prev(f.pos);
    std::vector<Vec3> v0(f.vel);
    std::vector<Vec3> accel(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 acc{0, -p.gravity, 0};
        acc += p.forcing;
        acc += hooks.extra_accel;
        if (hooks.self_attraction != 0.0) {
            Vec3 d = centroid - f.pos[i];
            double dn = d.norm();
            if (dn > 1e-9) acc += d * (hooks.self_attraction / dn);
        }
        if (hooks.cluster_of) {
            const int cl = (*hooks.cluster_of)[i];
            const double sign = (cl % 2 == 0) ? 1.0 : -1.0;
            acc += hooks.cluster_drift * sign * static_cast<double>(1 + cl / 2);
        }
        accel[i] = acc;
        f.vel[i] += acc * h;
    }

    // Viscosity before the advance: XSPH smoothing toward (or, for the
    // negative-viscosity violation, away from) the neighborhood velocity.
    const double visc = hooks.viscosity_override > -2.0 ? hooks.viscosity_override : p.viscosity;
    {
        detail::FluidGrid pre_grid(f.pos, hr);
        if (visc != 0.0) {
            std::vector<Vec3> smoothed(n);
            for (std::size_t i = 0; i < n; ++i) {
                Vec3 acc{0, 0, 0};
                pre_grid.for_neighbors(f.pos[i], [&](int j) {
                    if (static_cast<std::size_t>(j) == i) return;
                    if (hooks.cluster_of &&
                        (*hooks.cluster_of)[i] != (*hooks.cluster_of)[static_cast<std::size_t>(j)])
                        return;
                    Vec3 d = f.pos[static_cast<std::size_t>(j)] - f.pos[i];
                    double r = d.norm();
                    if (r >= hr) return;
                    double w = 1.0 - r / hr;
                    acc += (f.vel[static_cast<std::size_t>(j)] - f.vel[i]) * (w * w);
                });
                smoothed[i] = acc;
            }
            for (std::size_t i = 0; i < n; ++i) f.vel[i] += smoothed[i] * visc;
        }
    }

    // Ballistic advance with the average velocity (exact for free fall).
    for (std::size_t i = 0; i < n; ++i) f.pos[i] += (v0[i] + f.vel[i]) * (0.5 * h);
    detail::FluidGrid grid(f.pos, hr);

    // Double density relaxation.
    std::vector<Vec3> delta(n, Vec3{0, 0, 0});
    for (std::size_t i = 0; i < n; ++i) {
        double density = 0, near_density = 0;
        grid.for_neighbors(f.pos[i], [&](int j) {
            if (static_cast<std::size_t>(j) == i) return;
            if (hooks.cluster_of &&
                (*hooks.cluster_of)[i] != (*hooks.cluster_of)[static_cast<std::size_t>(j)])
                return;
            Vec3 d = f.pos[static_cast<std::size_t>(j)] - f.pos[i];
            double r = d.norm();
            if (r >= hr) return;
            double w = 1.0 - r / hr;
            density += w * w;
            near_density += w * w * w;
        });
        double pressure = p.stiffness * (density - p.rest_density);
        if (pressure < 0) pressure *= p.cohesion;
        double near_pressure = p.near_stiffness * near_density;
        Vec3 shift{0, 0, 0};
        grid.for_neighbors(f.pos[i], [&](int j) {
            if (static_cast<std::size_t>(j) == i) return;
            if (hooks.cluster_of &&
                (*hooks.cluster_of)[i] != (*hooks.cluster_of)[static_cast<std::size_t>(j)])
                return;
            Vec3 d = f.pos[static_cast<std::size_t>(j)] - f.pos[i];
            double r = d.norm();
            if (r >= hr || r < 1e-9) return;
            double w = 1.0 - r / hr;
            double mag = h * h * (pressure * w + near_pressure * w * w);
            Vec3 push = d * (mag / r);
            delta[static_cast<std::size_t>(j)] += push * 0.5;
            shift -= push * 0.5;
        });
        delta[i] += shift;
    }
    for (std::size_t i = 0; i < n; ++i) f.pos[i] += delta[i];

    // Boundaries, then velocity from the realized displacement. Adding back
    // the half-step kick makes a free particle follow the closed-form
    // ballistic path exactly; relaxation and wall pushes feed into velocity
    // as displacement rate.
    for (std::size_t i = 0; i < n; ++i) {
        Vec3& q = f.pos[i];
        q.x = clampd(q.x, bounds.lo.x, bounds.hi.x);
        q.y = clampd(q.y, bounds.lo.y, bounds.hi.y);
        q.z = clampd(q.z, bounds.lo.z, bounds.hi.z);
        for (const auto& [lo, hi] : bounds.obstacles) {
            if (q.x <= lo.x || q.x >= hi.x || q.y <= lo.y || q.y >= hi.y || q.z <= lo.z ||
                q.z >= hi.z)
                continue;
            // push out along the axis of least penetration
            const double dx = std::min(q.x - lo.x, hi.x - q.x);
            const double dy = std::min(q.y - lo.y, hi.y - q.y);
            const double dz = std::min(q.z - lo.z, hi.z - q.z);
            if (dx <= dy && dx <= dz)
                q.x = (q.x - lo.x < hi.x - q.x) ? lo.x : hi.x;
            else if (dy <= dz)
                q.y = (q.y - lo.y < hi.y - q.y) ? lo.y : hi.y;
            else
                q.z = (q.z - lo.z < hi.z - q.z) ? lo.z : hi.z;
        }
        f.vel[i] = (q - prev[i]) / h + accel[i] * (0.5 * h);
        if (!q.finite() || !f.vel[i].finite())
            throw UnstableSimulation("fluid: non-finite particle");
    }
}

} // namespace lpv::sim
