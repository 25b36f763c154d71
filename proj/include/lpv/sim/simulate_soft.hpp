#pragma once

#include <algorithm>
#include <cmath>

#include "lpv/sim/simulate.hpp"

namespace lpv::sim {

// --- cloth scenarios ---------------------------------------------------------

namespace detail {

inline ClothState make_cloth_grid(int nx, int ny, double width, double height,
                                  const Vec3& origin, const Vec3& xdir, const Vec3& ydir,
                                  const Vec3& color) {
    ClothState c;
    c.nx = nx;
    c.ny = ny;
    c.rest = width / (nx - 1);
    c.rest_y = height / (ny - 1);
    c.color = color;
    c.pos.resize(static_cast<std::size_t>(nx) * ny);
    c.vel.assign(c.pos.size(), Vec3{});
    c.fixed.assign(c.pos.size(), 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            c.pos[static_cast<std::size_t>(c.idx(i, j))] =
                origin + xdir * (width * i / (nx - 1)) + ydir * (height * j / (ny - 1));
    return c;
}

} // namespace detail

inline SceneTrajectory simulate_cloth_drape(const ScenarioSpec& spec, std::uint64_t seed,
                                            const SimViolation* vio) {
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x64726170ULL));
    const int n = static_cast<int>(spec.phys("grid_n"));
    const double size = spec.phys("cloth_size");
    const double y0 = spec.phys("start_height") + rng.uniform(-0.012, 0.012);
    const Vec3 support{spec.phys("support_x"), spec.phys("support_height"), 0};
    const double support_r = spec.phys("support_radius");

    ClothState cloth = detail::make_cloth_grid(
        n, n, size, size, Vec3{-size / 2 + rng.uniform(-0.01, 0.01), y0, -size / 2},
        {1, 0, 0}, {0, 0, 1}, spec.appearance.object_colors[0]);
    ClothParams params;
    params.gravity = spec.phys("gravity");
    params.stiffness = 2500;
    params.shear_stiffness = 900;
    params.bend_stiffness = 250;
    std::vector<ClothSpring> springs = cloth_springs(cloth, params);
    ClothColliders colliders;
    colliders.sphere = true;
    colliders.sphere_center = support;
    colliders.sphere_radius = support_r;

    RigidBodyState support_body = detail::make_sphere(support, support_r, 0,
                                                      spec.appearance.object_colors[1]);

    auto emit = [&](double t, bool frozen) {
        SceneState s;
        s.sim_time = t;
        s.light_dir = spec.appearance.light_dir;
        s.bodies = {support_body};
        s.cloth = cloth;
        if (frozen)
            for (Vec3& v : s.cloth->vel) v = {0, 0, 0};
        traj.states.push_back(std::move(s));
    };

    bool frozen = false;
    emit(0.0, false);
    for (int k = 1; k < spec.frame_count; ++k) {
        ClothStepHooks hooks;
        if (vio && vio->at(k)) {
            if (vio->is(ViolationKind::Penetration)) hooks.disable_sphere_collision = true;
            if (vio->is(ViolationKind::RigidCloth)) frozen = true;
        }
        const double t = k * spec.frame_dt;
        if (!frozen) {
            const double h = spec.frame_dt / spec.substeps;
            for (int s = 0; s < spec.substeps; ++s) {
                const double ts = (k - 1) * spec.frame_dt + s * h;
                Vec3 breeze{0.25 * std::sin(2.1 * ts + 0.7), 0, 0.2 * std::sin(1.7 * ts + 1.9)};
                step_cloth(cloth, springs, h, breeze, colliders, params, hooks);
            }
        }
        emit(t, frozen);
    }
    return traj;
}

inline SceneTrajectory simulate_cloth_waving(const ScenarioSpec& spec, std::uint64_t seed,
                                             const SimViolation* vio) {
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x77617665ULL));
    const int nx = static_cast<int>(spec.phys("grid_nx"));
    const int ny = static_cast<int>(spec.phys("grid_ny"));
    const double w = spec.phys("flag_w");
    const double h_flag = spec.phys("flag_h");
    const double top_y = spec.phys("top_y");
    const double pole_x = spec.phys("pole_x");
    const double wind_base = spec.phys("wind_base") * rng.uniform(0.98, 1.02);
    const double wind_gust = spec.phys("wind_gust");
    const double wind_freq = spec.phys("wind_freq");
    const double gust_phase = rng.uniform(0, 6.2831853);

    ClothState cloth = detail::make_cloth_grid(nx, ny, w, h_flag, Vec3{pole_x, top_y, 0},
                                               {1, 0, 0}, {0, -1, 0},
                                               spec.appearance.object_colors[0]);
    for (int j = 0; j < ny; ++j) cloth.fixed[static_cast<std::size_t>(cloth.idx(0, j))] = 1;
    ClothParams params;
    params.gravity = spec.phys("gravity");
    params.stiffness = 2500;
    params.shear_stiffness = 900;
    params.bend_stiffness = 250;
    params.damping = 0.02;
    std::vector<ClothSpring> springs = cloth_springs(cloth, params);
    ClothColliders colliders; // ground only; the flag never reaches it
    std::vector<std::uint8_t> dead(springs.size(), 0);

    RigidBodyState pole = detail::make_box({pole_x - 0.015, top_y - h_flag / 2, 0},
                                           {0.02, h_flag / 2 + 0.35, 0.02}, 0,
                                           spec.appearance.object_colors[2]);

    auto wind_at = [&](double t) {
        return Vec3{wind_base + wind_gust * std::sin(wind_freq * t + gust_phase),
                    0.35 * std::sin(1.3 * t + 0.4),
                    1.05 * std::sin(2.3 * t + gust_phase * 0.7)};
    };

    auto emit = [&](double t) {
        SceneState s;
        s.sim_time = t;
        s.light_dir = spec.appearance.light_dir;
        s.bodies = {pole};
        s.cloth = cloth;
        traj.states.push_back(std::move(s));
    };

    // settle-in: pre-roll so frame 0 already shows a established waving state
    {
        const double h = spec.frame_dt / spec.substeps;
        for (int s = 0; s < spec.substeps * 14; ++s)
            step_cloth(cloth, springs, h, wind_at(-0.6 + s * h), colliders, params);
    }

    emit(0.0);
    double t_prev = 0.0;
    for (int k = 1; k < spec.frame_count; ++k) {
        double t_k = k * spec.frame_dt;
        if (vio && vio->is(ViolationKind::TimeFreeze) && vio->at(k)) {
            const int fr = static_cast<int>(vio->mag("freeze_frames"));
            const int rn = static_cast<int>(vio->mag("run_frames"));
            int q = k - vio->onset;
            int cycles = q / (fr + rn);
            int rem = q % (fr + rn);
            t_k = vio->onset * spec.frame_dt +
                  (cycles * rn + std::max(0, rem - fr)) * spec.frame_dt;
        }
        ClothStepHooks hooks;
        if (vio && vio->is(ViolationKind::ClothShatter) && vio->at(k)) {
            if (vio->starts(k)) {
                // cut along seeded vertical lines; pieces get outward kicks
                const int cracks = static_cast<int>(vio->mag("shatter_cracks"));
                std::vector<int> cuts;
                for (int c = 1; c <= cracks; ++c) cuts.push_back(c * nx / (cracks + 1));
                for (std::size_t si = 0; si < springs.size(); ++si) {
                    const int ia = springs[si].a % nx, ib = springs[si].b % nx;
                    for (int cut : cuts)
                        if ((ia < cut) != (ib < cut)) dead[si] = 1;
                }
                Rng kick(derive_seed(vio->seed, 0x6b69636bULL));
                std::vector<double> kick_z(static_cast<std::size_t>(cracks) + 1);
                for (auto& kz : kick_z) kz = kick.uniform(0.6, 1.1) * (kick.uniform() < 0.5 ? -1 : 1);
                for (int j = 0; j < ny; ++j)
                    for (int i = 0; i < nx; ++i) {
                        int piece = 0;
                        for (int cut : cuts)
                            if (i >= cut) ++piece;
                        cloth.vel[static_cast<std::size_t>(cloth.idx(i, j))].z +=
                            kick_z[static_cast<std::size_t>(piece)];
                    }
            }
            hooks.dead_springs = &dead;
        }
        const double dt_frame = t_k - t_prev;
        if (dt_frame > 1e-12) {
            const double h = dt_frame / spec.substeps;
            for (int s = 0; s < spec.substeps; ++s)
                step_cloth(cloth, springs, h, wind_at(t_prev + s * h), colliders, params, hooks);
        }
        emit(t_k);
        t_prev = t_k;
    }
    return traj;
}

// --- fluid scenarios ---------------------------------------------------------

namespace detail {

// Jittered grid fill of an axis-aligned box region.
inline void fill_box(FluidState& f, Rng& rng, const Vec3& lo, const Vec3& hi, int count,
                     const Vec3& vel) {
    const double spacing = 0.055;
    int added = 0;
    for (double y = lo.y; y <= hi.y && added < count; y += spacing)
        for (double x = lo.x; x <= hi.x && added < count; x += spacing)
            for (double z = lo.z; z <= hi.z && added < count; z += spacing) {
                Vec3 p{x + rng.uniform(-0.006, 0.006), y + rng.uniform(-0.006, 0.006),
                       z + rng.uniform(-0.006, 0.006)};
                f.pos.push_back(p);
                f.vel.push_back(vel);
                ++added;
            }
    // top up at seeded positions if the grid underfilled
    while (added < count) {
        f.pos.push_back({rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y),
                         rng.uniform(lo.z, hi.z)});
        f.vel.push_back(vel);
        ++added;
    }
}

inline void fill_ball(FluidState& f, Rng& rng, const Vec3& center, double radius, int count,
                      const Vec3& vel) {
    int added = 0;
    const double spacing = 0.042;
    for (double y = -radius; y <= radius && added < count; y += spacing)
        for (double x = -radius; x <= radius && added < count; x += spacing)
            for (double z = -radius; z <= radius && added < count; z += spacing) {
                Vec3 d{x, y, z};
                if (d.norm() > radius) continue;
                f.pos.push_back(center + d +
                                Vec3{rng.uniform(-0.004, 0.004), rng.uniform(-0.004, 0.004),
                                     rng.uniform(-0.004, 0.004)});
                f.vel.push_back(vel);
                ++added;
            }
    while (added < count) {
        Vec3 d{rng.uniform(-radius, radius), rng.uniform(-radius, radius),
               rng.uniform(-radius, radius)};
        if (d.norm() > radius) continue;
        f.pos.push_back(center + d);
        f.vel.push_back(vel);
        ++added;
    }
}

struct FluidFrameHooks {
    FluidStepHooks step;
    int spawn_per_frame = 0;      // MassCreation
    Vec3 spawn_center;
    double spawn_radius = 0.05;
    int remove_per_frame = 0;     // MassVanish
    bool freeze = false;          // PhaseShift solid windows
    std::vector<int> clusters;    // backing store for fragmentation
};

// Per-frame violation plumbing shared by the three fluid scenarios.
inline void fluid_frame_hooks(FluidFrameHooks& h, const ScenarioSpec& spec,
                              const SimViolation* vio, int frame, const FluidState& f,
                              std::uint64_t scen_tag) {
    h.step = FluidStepHooks{};
    h.spawn_per_frame = 0;
    h.remove_per_frame = 0;
    h.freeze = false;
    if (!vio || !vio->at(frame)) return;
    switch (vio->kind) {
        case ViolationKind::AntiGravity:
            h.step.extra_accel = {0, spec.phys("gravity") * (1.0 - vio->mag("antigravity_scale")) *
                                         -1.0 + spec.phys("gravity"),
                                  0};
            // net acceleration becomes antigravity_scale * g (upward when negative)
            h.step.extra_accel = {0, spec.phys("gravity") * (1.0 - vio->mag("antigravity_scale")),
                                  0};
            break;
        case ViolationKind::NegativeViscosity:
            h.step.viscosity_override = vio->mag("negative_viscosity");
            break;
        case ViolationKind::SelfAttraction:
            h.step.self_attraction = vio->mag("self_attraction");
            break;
        case ViolationKind::StreamFragmentation: {
            if (h.clusters.size() != f.pos.size()) {
                // spatial slabs along x at onset become the drifting blobs
                const int k = static_cast<int>(vio->mag("fragment_clusters"));
                std::vector<double> xs;
                xs.reserve(f.pos.size());
                for (const Vec3& p : f.pos) xs.push_back(p.x);
                std::vector<double> sorted = xs;
                std::sort(sorted.begin(), sorted.end());
                h.clusters.resize(f.pos.size());
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    const auto rank = static_cast<std::size_t>(
                        std::lower_bound(sorted.begin(), sorted.end(), xs[i]) - sorted.begin());
                    h.clusters[i] = std::min<int>(k - 1, static_cast<int>(rank * k / xs.size()));
                }
            }
            h.step.cluster_of = &h.clusters;
            h.step.cluster_drift = {vio->mag("fragment_drift"), 0, 0};
            break;
        }
        case ViolationKind::MassCreation:
            h.spawn_per_frame = static_cast<int>(vio->mag("spawn_rate"));
            break;
        case ViolationKind::MassVanish:
            h.remove_per_frame = std::max(
                1, static_cast<int>(vio->mag("vanish_fraction") * static_cast<double>(f.pos.size()) /
                                    std::max(1, spec.frame_count - vio->onset)));
            break;
        case ViolationKind::PhaseShift: {
            const int fr = 3, rn = 3;
            h.freeze = ((frame - vio->onset) % (fr + rn)) < fr;
            break;
        }
        default: break;
    }
    (void)scen_tag;
}

inline SceneState fluid_state(const FluidState& f, double t, const ScenarioSpec& spec,
                              const std::vector<RigidBodyState>& scenery) {
    SceneState s;
    s.sim_time = t;
    s.light_dir = spec.appearance.light_dir;
    s.bodies = scenery;
    s.fluid = f;
    return s;
}

} // namespace detail

inline SceneTrajectory simulate_droplet_fall(const ScenarioSpec& spec, std::uint64_t seed,
                                             const SimViolation* vio) {
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x64726f70ULL));
    const double half = spec.phys("pool_half");
    const double blob_r = spec.phys("blob_radius");
    const double blob_h = spec.phys("blob_height") + rng.uniform(-0.01, 0.01);

    FluidState fluid;
    fluid.color = spec.appearance.object_colors[0] * 0.4 + Vec3{0.1, 0.25, 0.6};
    fluid.radius = 0.032;
    detail::fill_box(fluid, rng, {-half + 0.03, 0.02, -half + 0.03},
                     {half - 0.03, 0.085, half - 0.03},
                     static_cast<int>(spec.phys("pool_particles")), {});
    detail::fill_ball(fluid, rng, {0, blob_h, 0}, blob_r,
                      static_cast<int>(spec.phys("blob_particles")), {0, -0.25, 0});

    FluidParams params;
    params.gravity = spec.phys("gravity");
    FluidBounds bounds;
    bounds.lo = {-half, 0.0, -half};
    bounds.hi = {half, 8.0, half};

    // tank walls as thin boxes for rendering
    std::vector<RigidBodyState> scenery;
    const Vec3 wall_c = spec.appearance.object_colors[2] * 0.5 + Vec3{0.3, 0.3, 0.3};
    const double wt = 0.025, wh = 0.12;
    scenery.push_back(detail::make_box({0, wh, -half - wt}, {half + 2 * wt, wh, wt}, 0, wall_c));
    scenery.push_back(detail::make_box({0, wh, half + wt}, {half + 2 * wt, wh, wt}, 0, wall_c));
    scenery.push_back(detail::make_box({-half - wt, wh, 0}, {wt, wh, half}, 0, wall_c));
    scenery.push_back(detail::make_box({half + wt, wh, 0}, {wt, wh, half}, 0, wall_c));

    detail::FluidFrameHooks hooks;
    traj.states.push_back(detail::fluid_state(fluid, 0.0, spec, scenery));
    Rng spawn_rng(derive_seed(seed, 0x7370776eULL));
    for (int k = 1; k < spec.frame_count; ++k) {
        detail::fluid_frame_hooks(hooks, spec, vio, k, fluid, 1);
        if (hooks.spawn_per_frame > 0)
            for (int i = 0; i < hooks.spawn_per_frame; ++i) {
                fluid.pos.push_back({spawn_rng.uniform(-0.06, 0.06),
                                     blob_h + 0.2 + spawn_rng.uniform(0, 0.1),
                                     spawn_rng.uniform(-0.06, 0.06)});
                fluid.vel.push_back({0, -0.5, 0});
            }
        if (hooks.remove_per_frame > 0 && fluid.pos.size() > 20) {
            const std::size_t keep =
                fluid.pos.size() - std::min<std::size_t>(fluid.pos.size() - 20,
                                                          hooks.remove_per_frame);
            fluid.pos.resize(keep);
            fluid.vel.resize(keep);
        }
        if (!hooks.freeze) {
            const int sub = 4;
            const double h = spec.frame_dt / sub;
            for (int s = 0; s < sub; ++s) step_fluid(fluid, h, params, bounds, hooks.step);
        } else {
            for (Vec3& v : fluid.vel) v = {0, 0, 0};
        }
        traj.states.push_back(detail::fluid_state(fluid, k * spec.frame_dt, spec, scenery));
    }
    return traj;
}

inline SceneTrajectory simulate_faucet_flow(const ScenarioSpec& spec, std::uint64_t seed,
                                            const SimViolation* vio) {
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x66617563ULL));
    const double half = spec.phys("tank_half");
    const double ys = spec.phys("spout_height");
    const int queue_size = static_cast<int>(spec.phys("queue_size"));

    FluidState fluid;
    fluid.color = spec.appearance.object_colors[0] * 0.35 + Vec3{0.12, 0.28, 0.62};
    fluid.radius = 0.032;
    // stream column: particles seeded along the fall path with terminal-speed
    // velocities, so the flow is already established at frame 0
    const int stream_n = static_cast<int>(spec.phys("stream_particles"));
    for (int i = 0; i < stream_n; ++i) {
        const double y = 0.10 + (ys - 0.10) * rng.uniform(0.0, 1.0);
        const double drop = ys - y;
        fluid.pos.push_back({rng.uniform(-0.045, 0.045), y, rng.uniform(-0.045, 0.045)});
        fluid.vel.push_back({0, -std::sqrt(std::max(0.04, 2 * 9.81 * drop)), 0});
    }
    detail::fill_box(fluid, rng, {-half + 0.03, 0.02, -half + 0.03},
                     {half - 0.03, 0.12, half - 0.03},
                     static_cast<int>(spec.phys("pool_particles")), {});

    FluidParams params;
    params.gravity = spec.phys("gravity");
    FluidBounds bounds;
    bounds.lo = {-half, 0.0, -half};
    bounds.hi = {half, 8.0, half};

    std::vector<RigidBodyState> scenery;
    const Vec3 wall_c = spec.appearance.object_colors[2] * 0.5 + Vec3{0.3, 0.3, 0.3};
    const double wt = 0.025, wh = 0.16;
    scenery.push_back(detail::make_box({0, wh, -half - wt}, {half + 2 * wt, wh, wt}, 0, wall_c));
    scenery.push_back(detail::make_box({0, wh, half + wt}, {half + 2 * wt, wh, wt}, 0, wall_c));
    scenery.push_back(detail::make_box({-half - wt, wh, 0}, {wt, wh, half}, 0, wall_c));
    scenery.push_back(detail::make_box({half + wt, wh, 0}, {wt, wh, half}, 0, wall_c));
    // the spout
    scenery.push_back(detail::make_box({0, ys + 0.1, 0}, {0.09, 0.1, 0.09}, 0,
                                       spec.appearance.object_colors[1]));

    const double respawn_top = ys + 0.05, respawn_floor = ys - 0.14;
    auto in_spout_zone = [&](const Vec3& p) {
        return p.y > respawn_floor && std::abs(p.x) < 0.1 && std::abs(p.z) < 0.1;
    };

    detail::FluidFrameHooks hooks;
    traj.states.push_back(detail::fluid_state(fluid, 0.0, spec, scenery));
    Rng respawn_rng(derive_seed(seed, 0x72737061ULL));
    for (int k = 1; k < spec.frame_count; ++k) {
        // steady-stream recycling: settled pool particles refill the queue
        // hidden inside the spout (the one sanctioned teleport in a valid run)
        int queued = 0;
        for (const Vec3& p : fluid.pos)
            if (in_spout_zone(p)) ++queued;
        int need = queue_size - queued;
        for (std::size_t i = 0; i < fluid.pos.size() && need > 0; ++i) {
            if (fluid.pos[i].y < 0.10 && fluid.vel[i].norm() < 0.65) {
                fluid.pos[i] = {respawn_rng.uniform(-0.04, 0.04),
                                respawn_floor + respawn_rng.uniform(0.02, respawn_top - respawn_floor - 0.02),
                                respawn_rng.uniform(-0.04, 0.04)};
                fluid.vel[i] = {0, -0.6, 0};
                --need;
            }
        }
        detail::fluid_frame_hooks(hooks, spec, vio, k, fluid, 2);
        if (hooks.spawn_per_frame > 0)
            for (int i = 0; i < hooks.spawn_per_frame; ++i) {
                fluid.pos.push_back({respawn_rng.uniform(-0.05, 0.05), ys + 0.22 + 0.02 * i,
                                     respawn_rng.uniform(-0.05, 0.05)});
                fluid.vel.push_back({0, -0.4, 0});
            }
        if (!hooks.freeze) {
            const int sub = 4;
            const double h = spec.frame_dt / sub;
            for (int s = 0; s < sub; ++s) step_fluid(fluid, h, params, bounds, hooks.step);
        } else {
            for (Vec3& v : fluid.vel) v = {0, 0, 0};
        }
        traj.states.push_back(detail::fluid_state(fluid, k * spec.frame_dt, spec, scenery));
    }
    return traj;
}

inline SceneTrajectory simulate_river_flow(const ScenarioSpec& spec, std::uint64_t seed,
                                           const SimViolation* vio) {
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x72697672ULL));
    const double hx = spec.phys("channel_half_x");
    const double hz = spec.phys("channel_half_z");
    const double current = spec.phys("current") * rng.uniform(0.98, 1.02);

    FluidState fluid;
    fluid.color = spec.appearance.object_colors[0] * 0.35 + Vec3{0.1, 0.3, 0.62};
    fluid.radius = 0.032;
    detail::fill_box(fluid, rng, {-hx + 0.03, 0.02, -hz + 0.02}, {hx - 0.03, 0.16, hz - 0.02},
                     static_cast<int>(spec.phys("particles")), {current, 0, 0});

    FluidParams params;
    params.gravity = spec.phys("gravity");
    params.forcing = {spec.phys("drive"), 0, 0};
    FluidBounds bounds;
    bounds.lo = {-hx, 0.0, -hz};
    bounds.hi = {hx, 6.0, hz};
    const double rock_x = spec.phys("rock_x");
    // obstacle boxes reach below the bed so floor-clamped particles are
    // strictly inside and get deflected
    bounds.obstacles.push_back({{rock_x - 0.07, -0.1, -0.1}, {rock_x + 0.07, 0.35, 0.1}});

    std::vector<RigidBodyState> scenery;
    const Vec3 bank_c = spec.appearance.object_colors[2] * 0.6 + Vec3{0.25, 0.22, 0.18};
    scenery.push_back(detail::make_box({0, 0.14, -hz - 0.05}, {hx, 0.14, 0.05}, 0, bank_c));
    scenery.push_back(detail::make_box({0, 0.14, hz + 0.05}, {hx, 0.14, 0.05}, 0, bank_c));
    scenery.push_back(detail::make_box({rock_x, 0.16, 0}, {0.07, 0.17, 0.1}, 0,
                                       spec.appearance.object_colors[1]));

    const double barrier_x = 0.45;
    detail::FluidFrameHooks hooks;
    traj.states.push_back(detail::fluid_state(fluid, 0.0, spec, scenery));
    for (int k = 1; k < spec.frame_count; ++k) {
        detail::fluid_frame_hooks(hooks, spec, vio, k, fluid, 3);
        FluidBounds frame_bounds = bounds;
        if (vio && vio->is(ViolationKind::InvisibleBarrier) && vio->at(k))
            frame_bounds.obstacles.push_back(
                {{barrier_x - 0.05, -0.1, -hz - 0.1}, {barrier_x + 0.05, 1.5, hz + 0.1}});
        if (hooks.remove_per_frame > 0 && fluid.pos.size() > 20) {
            const std::size_t keep =
                fluid.pos.size() - std::min<std::size_t>(fluid.pos.size() - 20,
                                                          hooks.remove_per_frame);
            fluid.pos.resize(keep);
            fluid.vel.resize(keep);
        }
        if (!hooks.freeze) {
            const int sub = 4;
            const double h = spec.frame_dt / sub;
            for (int s = 0; s < sub; ++s) step_fluid(fluid, h, params, frame_bounds, hooks.step);
        } else {
            for (Vec3& v : fluid.vel) v = {0, 0, 0};
        }
        traj.states.push_back(detail::fluid_state(fluid, k * spec.frame_dt, spec, scenery));
    }
    return traj;
}

// --- dispatcher --------------------------------------------------------------

// Valid simulation of any scenario: a pure function of (spec, seed).
// The hook argument is internal plumbing for the violation injector.
inline SceneTrajectory simulate_scenario(const ScenarioSpec& spec, std::uint64_t seed,
                                         const SimViolation* vio = nullptr) {
    SceneTrajectory traj;
    switch (spec.scenario_id) {
        case ScenarioId::BallCollision: traj = simulate_ball_collision(spec, seed, vio); break;
        case ScenarioId::BallDrop: traj = simulate_ball_drop(spec, seed, vio); break;
        case ScenarioId::BlockSlide: traj = simulate_block_slide(spec, seed, vio); break;
        case ScenarioId::PendulumOscillation: traj = simulate_pendulum(spec, seed, vio); break;
        case ScenarioId::PyramidImpact: traj = simulate_pyramid_impact(spec, seed, vio); break;
        case ScenarioId::ClothDrape: traj = simulate_cloth_drape(spec, seed, vio); break;
        case ScenarioId::ClothWaving: traj = simulate_cloth_waving(spec, seed, vio); break;
        case ScenarioId::DropletFall: traj = simulate_droplet_fall(spec, seed, vio); break;
        case ScenarioId::FaucetFlow: traj = simulate_faucet_flow(spec, seed, vio); break;
        case ScenarioId::RiverFlow: traj = simulate_river_flow(spec, seed, vio); break;
        case ScenarioId::MovingShadow:
        case ScenarioId::OrbitShadow: traj = simulate_optics(spec, seed, vio); break;
    }
    traj.sim_seed = seed;
    for (const SceneState& s : traj.states)
        for (const RigidBodyState& b : s.bodies)
            if (!b.pos.finite() || std::abs(b.orient.norm() - 1.0) > 1e-6)
                throw UnstableSimulation("scenario produced invalid body state");
    return traj;
}

} // namespace lpv::sim
