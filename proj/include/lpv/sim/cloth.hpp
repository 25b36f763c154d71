#pragma once

#include <cmath>
#include <vector>

#include "lpv/core/error.hpp"
#include "lpv/core/math.hpp"
#include "lpv/sim/types.hpp"

namespace lpv::sim {

// Sphere and ground-plane colliders for cloth.
struct ClothColliders {
    bool ground = true;
    double ground_y = 0.0;
    bool sphere = false;
    Vec3 sphere_center;
    double sphere_radius = 0.0;
    double skin = 0.004; // collision offset
};

struct ClothParams {
    double gravity = 9.81;
    double stiffness = 60.0;   // structural spring constant per unit mass
    double shear_stiffness = 25.0;
    double bend_stiffness = 8.0;
    double damping = 0.015;    // velocity retention per substep: v *= (1 - damping)
    double vertex_mass = 1.0e-3;
    double strain_limit = 1.10; // hard clamp on structural stretch
};

struct ClothSpring {
    int a, b;
    double rest;
    double k;
};

// Topology is a function of the grid size only, so it is identical across
// all frames and all violations of one variation.
inline std::vector<ClothSpring> cloth_springs(const ClothState& c, const ClothParams& p) {
    std::vector<ClothSpring> springs;
    auto add = [&](int i0, int j0, int i1, int j1, double k) {
        Vec3 d = c.pos[static_cast<std::size_t>(c.idx(i1, j1))] -
                 c.pos[static_cast<std::size_t>(c.idx(i0, j0))];
        springs.push_back({c.idx(i0, j0), c.idx(i1, j1), d.norm(), k});
    };
    for (int j = 0; j < c.ny; ++j)
        for (int i = 0; i < c.nx; ++i) {
            if (i + 1 < c.nx) add(i, j, i + 1, j, p.stiffness);
            if (j + 1 < c.ny) add(i, j, i, j + 1, p.stiffness);
            if (i + 1 < c.nx && j + 1 < c.ny) {
                add(i, j, i + 1, j + 1, p.shear_stiffness);
                add(i + 1, j, i, j + 1, p.shear_stiffness);
            }
            if (i + 2 < c.nx) add(i, j, i + 2, j, p.bend_stiffness);
            if (j + 2 < c.ny) add(i, j, i, j + 2, p.bend_stiffness);
        }
    return springs;
}

// Structural springs with rest lengths taken from the grid spacing, so the
// spring-length invariant can be evaluated on any (deformed) state.
inline std::vector<ClothSpring> cloth_structural_springs(const ClothState& c) {
    std::vector<ClothSpring> out;
    for (int j = 0; j < c.ny; ++j)
        for (int i = 0; i < c.nx; ++i) {
            if (i + 1 < c.nx) out.push_back({c.idx(i, j), c.idx(i + 1, j), c.rest, 0});
            if (j + 1 < c.ny) out.push_back({c.idx(i, j), c.idx(i, j + 1), c.rest_y, 0});
        }
    return out;
}

struct ClothStepHooks {
    // Penetration violation: ignore the sphere collider.
    bool disable_sphere_collision = false;
    // Shatter violation: springs listed here exert no force.
    const std::vector<std::uint8_t>* dead_springs = nullptr;
};

// One substep of Verlet mass-spring integration with damping, strain
// limiting, and collider projection. Fixed vertices never move.
inline void step_cloth(ClothState& c, const std::vector<ClothSpring>& springs, double h,
                       const Vec3& wind, const ClothColliders& colliders, const ClothParams& p,
                       const ClothStepHooks& hooks = {}) {
    const std::size_t n = c.pos.size();
    std::vector<Vec3> force(n, Vec3{0, -p.gravity * p.vertex_mass, 0});
    for (std::size_t i = 0; i < n; ++i) force[i] += wind * p.vertex_mass;

    for (std::size_t s = 0; s < springs.size(); ++s) {
        if (hooks.dead_springs && (*hooks.dead_springs)[s]) continue;
        const ClothSpring& sp = springs[s];
        Vec3 d = c.pos[static_cast<std::size_t>(sp.b)] - c.pos[static_cast<std::size_t>(sp.a)];
        const double len = d.norm();
        if (len < 1e-12) continue;
        Vec3 f = d * (sp.k * p.vertex_mass * (len - sp.rest) / len);
        force[static_cast<std::size_t>(sp.a)] += f;
        force[static_cast<std::size_t>(sp.b)] -= f;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (c.fixed[i]) {
            c.vel[i] = {0, 0, 0};
            continue;
        }
        c.vel[i] += force[i] * (h / p.vertex_mass);
        c.vel[i] *= (1.0 - p.damping);
        c.pos[i] += c.vel[i] * h;
    }

    // Strain limiting on structural springs keeps stretch inside the
    // invariant band even under gusts.
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t s = 0; s < springs.size(); ++s) {
            if (hooks.dead_springs && (*hooks.dead_springs)[s]) continue;
            const ClothSpring& sp = springs[s];
            if (sp.k != p.stiffness) continue;
            std::size_t ia = static_cast<std::size_t>(sp.a), ib = static_cast<std::size_t>(sp.b);
            Vec3 d = c.pos[ib] - c.pos[ia];
            const double len = d.norm();
            const double max_len = sp.rest * p.strain_limit;
            if (len <= max_len || len < 1e-12) continue;
            Vec3 corr = d * ((len - max_len) / len);
            const bool fa = c.fixed[ia], fb = c.fixed[ib];
            if (fa && fb) continue;
            if (fa)
                c.pos[ib] -= corr;
            else if (fb)
                c.pos[ia] += corr;
            else {
                c.pos[ia] += corr * 0.5;
                c.pos[ib] -= corr * 0.5;
            }
        }

    // Collider projection: penetrating vertices land on the surface and
    // lose their inward normal velocity.
    for (std::size_t i = 0; i < n; ++i) {
        if (c.fixed[i]) continue;
        if (colliders.ground) {
            const double floor = colliders.ground_y + colliders.skin;
            if (c.pos[i].y < floor) {
                c.pos[i].y = floor;
                if (c.vel[i].y < 0) c.vel[i].y = 0;
                c.vel[i].x *= 0.98; // ground friction
                c.vel[i].z *= 0.98;
            }
        }
        if (colliders.sphere && !hooks.disable_sphere_collision) {
            Vec3 d = c.pos[i] - colliders.sphere_center;
            const double dist = d.norm();
            const double min_dist = colliders.sphere_radius + colliders.skin;
            if (dist < min_dist && dist > 1e-12) {
                Vec3 nrm = d / dist;
                c.pos[i] = colliders.sphere_center + nrm * min_dist;
                const double vn = c.vel[i].dot(nrm);
                if (vn < 0) c.vel[i] -= nrm * vn;
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        if (!c.pos[i].finite()) throw UnstableSimulation("cloth: non-finite vertex");
}

} // namespace lpv::sim
