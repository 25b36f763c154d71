#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lpv/core/rng.hpp"
#include "lpv/sim/cloth.hpp"
#include "lpv/sim/fluid.hpp"
#include "lpv/sim/pendulum.hpp"
#include "lpv/sim/rigid.hpp"
#include "lpv/sim/scenario_specs.hpp"
#include "lpv/sim/types.hpp"

namespace lpv::sim {

// Dynamics-level violation hook threaded through a simulation. Null means
// a valid run; the pre-onset code path is identical either way, which is
// what guarantees bit-identical prefixes.
struct SimViolation {
    ViolationKind kind = ViolationKind::TemporalDisorder;
    int onset = 1 << 28;
    std::uint64_t seed = 0;
    const std::map<std::string, double>* magnitudes = nullptr;

    double mag(const char* key) const { return magnitude_of(magnitudes, key); }
    bool is(ViolationKind k) const { return kind == k; }
    bool at(int frame) const { return frame >= onset; }
    bool starts(int frame) const { return frame == onset; }
};

namespace detail {

inline bool vio_is(const SimViolation* v, ViolationKind k) { return v && v->is(k); }

inline RigidBodyState make_sphere(const Vec3& pos, double r, double mass, const Vec3& color) {
    RigidBodyState b;
    b.shape = ShapeType::Sphere;
    b.pos = pos;
    b.half_extents = {r, r, r};
    b.inv_mass = mass > 0 ? 1.0 / mass : 0.0;
    b.color = color;
    return b;
}

inline RigidBodyState make_box(const Vec3& pos, const Vec3& half, double mass, const Vec3& color,
                               const Quat& orient = Quat::identity()) {
    RigidBodyState b;
    b.shape = ShapeType::Box;
    b.pos = pos;
    b.half_extents = half;
    b.orient = orient;
    b.inv_mass = mass > 0 ? 1.0 / mass : 0.0;
    b.color = color;
    return b;
}

inline SceneState rigid_state(const RigidWorld& world, double t, const ScenarioSpec& spec) {
    SceneState s;
    s.sim_time = t;
    s.bodies = world.bodies;
    for (std::size_t i = 0; i < s.bodies.size(); ++i)
        if (world.is_disabled(i)) s.bodies[i].visible = false;
    s.light_dir = spec.appearance.light_dir;
    return s;
}

// Scales the primary body over the ramp window (dynamics-level so contact
// geometry follows the visual size).
inline void apply_size_ramp(RigidBodyState& body, const Vec3& base_half, int frame,
                            const SimViolation& vio) {
    const double target = vio.mag("size_change");
    const double ramp = vio.mag("size_ramp_frames");
    const double s =
        1.0 + (target - 1.0) * std::min(1.0, (frame - vio.onset + 1) / std::max(1.0, ramp));
    body.half_extents = base_half * s;
}

} // namespace detail

// --- rigid scenarios -------------------------------------------------------

inline SceneTrajectory simulate_ball_collision(const ScenarioSpec& spec, std::uint64_t seed,
                                               const SimViolation* vio) {
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x62636f6cULL));
    const double r = spec.phys("radius");
    const double v0 = spec.phys("speed") * rng.uniform(0.97, 1.03);
    const double gap = spec.phys("gap");
    const double mass = 600.0 * r * r * r;

    RigidWorld world;
    world.gravity = {0, -spec.phys("gravity"), 0};
    world.restitution = spec.phys("restitution");
    world.planes.push_back({{0, 1, 0}, 0.0, 0.0});
    const auto& colors = spec.appearance.object_colors;
    const double x0 = 0.5 * gap + r + rng.uniform(-0.01, 0.01);
    world.bodies.push_back(detail::make_sphere({-x0, r, 0}, r, mass, colors[0]));
    world.bodies.push_back(detail::make_sphere({x0, r, 0}, r, mass, colors[1]));
    world.bodies[0].vel = {v0, 0, 0};
    world.bodies[1].vel = {-v0, 0, 0};
    world.events = &traj.events;

    const Vec3 base_half = world.bodies[0].half_extents;
    traj.states.push_back(detail::rigid_state(world, 0.0, spec));
    for (int k = 1; k < spec.frame_count; ++k) {
        world.current_frame = k;
        if (vio && vio->at(k)) {
            if (vio->is(ViolationKind::OverRestitution))
                world.restitution_override = vio->mag("over_restitution");
            else if (vio->is(ViolationKind::InelasticStick))
                world.restitution_override = vio->mag("inelastic_stick");
            else if (vio->is(ViolationKind::Penetration))
                world.collide_bodies = false;
            else if (vio->is(ViolationKind::SizeChange))
                detail::apply_size_ramp(world.bodies[0], base_half, k, *vio);
            else if (vio->is(ViolationKind::PhantomForce) && vio->starts(k)) {
                const double ang = vio->mag("phantom_angle") *
                                   (derive_seed(vio->seed, 1) % 2 == 0 ? 1.0 : -1.0);
                Quat q = Quat::from_axis_angle({0, 1, 0}, ang);
                world.bodies[0].vel = q.rotate(world.bodies[0].vel);
            } else if (vio->is(ViolationKind::Teleport) && vio->starts(k)) {
                // jump to the mirror position past the other sphere
                Vec3& pa = world.bodies[0].pos;
                const Vec3& pb = world.bodies[1].pos;
                pa = Vec3{2 * pb.x - pa.x, pa.y, pa.z};
            }
        }
        world.step_frame(spec.frame_dt, spec.substeps);
        traj.states.push_back(detail::rigid_state(world, k * spec.frame_dt, spec));
    }
    return traj;
}

inline SceneTrajectory simulate_ball_drop(const ScenarioSpec& spec, std::uint64_t seed,
                                          const SimViolation* vio) {
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x62647270ULL));
    const double r = spec.phys("radius");
    const double h0 = spec.phys("drop_height") * rng.uniform(0.98, 1.02);
    const double mass = 600.0 * r * r * r;

    RigidWorld world;
    world.gravity = {0, -spec.phys("gravity"), 0};
    world.restitution = spec.phys("restitution") + rng.uniform(-0.015, 0.015);
    world.planes.push_back({{0, 1, 0}, 0.0, 0.0});
    world.bodies.push_back(
        detail::make_sphere({rng.uniform(-0.02, 0.02), h0 + r, rng.uniform(-0.02, 0.02)}, r,
                            mass, spec.appearance.object_colors[0]));
    world.events = &traj.events;

    const Vec3 base_half = world.bodies[0].half_extents;
    traj.states.push_back(detail::rigid_state(world, 0.0, spec));
    for (int k = 1; k < spec.frame_count; ++k) {
        world.current_frame = k;
        if (vio && vio->at(k)) {
            if (vio->is(ViolationKind::OverRestitution))
                world.restitution_override = vio->mag("over_restitution");
            else if (vio->is(ViolationKind::Penetration))
                world.collide_planes = false;
            else if (vio->is(ViolationKind::SizeChange))
                detail::apply_size_ramp(world.bodies[0], base_half, k, *vio);
        }
        world.step_frame(spec.frame_dt, spec.substeps);
        traj.states.push_back(detail::rigid_state(world, k * spec.frame_dt, spec));
    }
    return traj;
}

inline SceneTrajectory simulate_block_slide(const ScenarioSpec& spec, std::uint64_t seed,
                                            const SimViolation* vio) {
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x736c6964ULL));
    const double theta = deg2rad(spec.phys("incline_deg"));
    const double mu = spec.phys("mu");
    const Vec3 half{spec.phys("half_x"), spec.phys("half_y"), spec.phys("half_z")};
    // Slope descends toward +x; its surface passes through (0, surf_y, 0).
    const Vec3 n = Vec3{std::sin(theta), std::cos(theta), 0}.normalized();
    const double surf_y = 1.05;
    const double plane_offset = n.dot({0, surf_y, 0});
    const Vec3 slide_dir{std::cos(theta), -std::sin(theta), 0}; // downhill tangent

    RigidWorld world;
    world.gravity = {0, -spec.phys("gravity"), 0};
    world.restitution = 0.1;
    world.planes.push_back({n, plane_offset, mu});
    // The rendered ramp: a long static box whose top face is the plane.
    const double ramp_len = 1.7, ramp_th = 0.06;
    Quat ramp_q = Quat::from_axis_angle({0, 0, 1}, -theta);
    Vec3 ramp_center = Vec3{0, surf_y, 0} - n * ramp_th;
    world.bodies.push_back(detail::make_box(ramp_center, {ramp_len / 2, ramp_th, 0.5}, 0,
                                            spec.appearance.object_colors[2], ramp_q));
    // The sliding block, aligned with the slope, starting up-slope.
    const double s0 = -0.55 - spec.phys("slide_start") + rng.uniform(-0.015, 0.015);
    Vec3 start = Vec3{0, surf_y, 0} + slide_dir * s0 + n * half.y;
    RigidBodyState block =
        detail::make_box(start, half, 2.0, spec.appearance.object_colors[0], ramp_q);
    block.vel = slide_dir * rng.uniform(0.0, 0.05);
    world.bodies.push_back(block);
    world.events = &traj.events;
    const int bi = 1;
    const Vec3 base_half = half;

    traj.states.push_back(detail::rigid_state(world, 0.0, spec));
    for (int k = 1; k < spec.frame_count; ++k) {
        world.current_frame = k;
        if (vio && vio->at(k)) {
            if (vio->is(ViolationKind::HoverNoContact) && vio->starts(k)) {
                world.clearance_body = bi;
                world.clearance = vio->mag("hover_gap");
            } else if (vio->is(ViolationKind::SizeChange))
                detail::apply_size_ramp(world.bodies[bi], base_half, k, *vio);
            else if (vio->is(ViolationKind::ErraticMotion)) {
                const int period = static_cast<int>(vio->mag("erratic_period"));
                if ((k - vio->onset) % std::max(1, period) == 0) {
                    // reverse the along-slope velocity; energy never grows
                    Vec3& v = world.bodies[bi].vel;
                    const double along = v.dot(slide_dir);
                    v -= slide_dir * (2.0 * along);
                }
            }
        }
        world.step_frame(spec.frame_dt, spec.substeps);
        traj.states.push_back(detail::rigid_state(world, k * spec.frame_dt, spec));
    }
    return traj;
}

inline SceneTrajectory simulate_pyramid_impact(const ScenarioSpec& spec, std::uint64_t seed,
                                               const SimViolation* vio) {
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x70797261ULL));
    const double r = spec.phys("sphere_radius");
    const double ch = spec.phys("cube_half");
    const double sphere_mass = 600.0 * r * r * r;
    const double cube_mass = 700.0 * ch * ch * ch;

    RigidWorld world;
    world.gravity = {0, -spec.phys("gravity"), 0};
    world.restitution = spec.phys("restitution");
    world.body_mu = 0.05;
    world.planes.push_back({{0, 1, 0}, 0.0, 0.25});
    const auto& colors = spec.appearance.object_colors;

    // Bottom triangle of touching spheres plus one nested on top.
    const double a = 2.0 * r; // sphere center spacing
    const double circ = a / std::sqrt(3.0);
    for (int i = 0; i < 3; ++i) {
        double ang = 2.0943951023931953 * i + 0.35;
        world.bodies.push_back(detail::make_sphere(
            {circ * std::cos(ang), r, circ * std::sin(ang)}, r, sphere_mass, colors[i % 3]));
    }
    const double top_y = r + a * std::sqrt(2.0 / 3.0);
    world.bodies.push_back(detail::make_sphere({0, top_y, 0}, r, sphere_mass, colors[3 % 3]));
    // The cube, dropped to strike the top sphere mid-clip.
    const double cube_y = top_y + r + ch + spec.phys("drop_gap");
    world.bodies.push_back(detail::make_box(
        {rng.uniform(-0.015, 0.015), cube_y, rng.uniform(-0.015, 0.015)},
        {ch, ch, ch}, cube_mass, colors[3]));
    world.events = &traj.events;
    const int cube_idx = 4;

    traj.states.push_back(detail::rigid_state(world, 0.0, spec));
    for (int k = 1; k < spec.frame_count; ++k) {
        world.current_frame = k;
        if (vio && vio->at(k)) {
            if (vio->is(ViolationKind::EnergyAmplify))
                world.impulse_scale = vio->mag("energy_amplify");
            else if (vio->is(ViolationKind::EnergyDamp))
                world.impulse_scale = vio->mag("energy_damp");
            else if (vio->is(ViolationKind::AntiGravity))
                world.gravity_scale = vio->mag("antigravity_scale");
            else if (vio->is(ViolationKind::HoleInStack) && vio->starts(k)) {
                world.disabled.assign(world.bodies.size(), 0);
                world.disabled[static_cast<std::size_t>(derive_seed(vio->seed, 2) % 3)] = 1;
            } else if (vio->is(ViolationKind::Teleport) && vio->starts(k)) {
                world.bodies[cube_idx].pos.x -= 2.0 * (2.0 * ch);
            }
        }
        world.step_frame(spec.frame_dt, spec.substeps);
        traj.states.push_back(detail::rigid_state(world, k * spec.frame_dt, spec));
    }
    return traj;
}

// --- pendulum ---------------------------------------------------------------

inline SceneTrajectory simulate_pendulum(const ScenarioSpec& spec, std::uint64_t seed,
                                         const SimViolation* vio) {
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x70656e64ULL));
    const double length = spec.phys("length");
    const double g = spec.phys("gravity");
    const double bob_r = spec.phys("bob_radius");
    const Vec3 pivot{0, spec.phys("pivot_height"), 0};
    double theta = spec.phys("theta0") * rng.uniform(0.96, 1.04);
    double omega = rng.uniform(-0.03, 0.03);
    const auto& colors = spec.appearance.object_colors;

    bool broken = false;
    Vec3 bob_pos, bob_vel;

    auto emit = [&](double t) {
        SceneState s;
        s.sim_time = t;
        s.light_dir = spec.appearance.light_dir;
        RigidBodyState pin = detail::make_sphere(pivot, 0.03, 0, colors[2]);
        pin.casts_shadow = false;
        Vec3 dir{std::sin(theta), -std::cos(theta), 0};
        RigidBodyState rod = detail::make_box(pivot + dir * (length / 2),
                                              {0.012, length / 2, 0.012}, 0, colors[1],
                                              Quat::from_axis_angle({0, 0, 1}, theta));
        rod.casts_shadow = false;
        Vec3 bp = broken ? bob_pos : pivot + dir * length;
        Vec3 bv = broken ? bob_vel
                         : Vec3{std::cos(theta), std::sin(theta), 0} * (length * omega);
        RigidBodyState bob = detail::make_sphere(bp, bob_r, 1.0, colors[0]);
        bob.vel = bv;
        s.bodies = {pin, rod, bob};
        traj.states.push_back(std::move(s));
    };

    emit(0.0);
    double t_prev = 0.0;
    for (int k = 1; k < spec.frame_count; ++k) {
        // TimeFreeze warps the frame clock; all other kinds leave it uniform.
        double t_k = k * spec.frame_dt;
        if (vio && vio->is(ViolationKind::TimeFreeze) && vio->at(k)) {
            const int fr = static_cast<int>(vio->mag("freeze_frames"));
            const int rn = static_cast<int>(vio->mag("run_frames"));
            int q = k - vio->onset;
            int cycles = q / (fr + rn);
            int rem = q % (fr + rn);
            double advanced = (cycles * rn + std::max(0, rem - fr)) * spec.frame_dt;
            t_k = vio->onset * spec.frame_dt + advanced;
        }
        const double dt_frame = t_k - t_prev;
        if (dt_frame > 1e-12) {
            const int steps = spec.substeps;
            const double h = dt_frame / steps;
            for (int s = 0; s < steps; ++s) {
                if (broken) {
                    Vec3 v0 = bob_vel;
                    bob_vel += Vec3{0, -g, 0} * h;
                    bob_pos += (v0 + bob_vel) * (0.5 * h);
                    if (bob_pos.y < bob_r) { // floor stop
                        bob_pos.y = bob_r;
                        bob_vel = {0, 0, 0};
                    }
                    // the rod keeps swinging without its bob
                    auto [th2, om2] = pendulum_step(theta, omega, h, g, length);
                    theta = th2;
                    omega = om2;
                } else {
                    double g_eff = g;
                    if (vio && vio->is(ViolationKind::FrequencyVariation) && vio->at(k)) {
                        const double lo = vio->mag("gravity_mod_low");
                        const double ph =
                            0.9 * (t_prev + s * h) * 6.2831853 +
                            static_cast<double>(derive_seed(vio->seed, 3) % 628) * 0.01;
                        g_eff = g * (lo + (1.0 - lo) * 0.5 * (1.0 + std::sin(ph * 1.7)));
                    }
                    auto [th2, om2] = pendulum_step(theta, omega, h, g_eff, length);
                    theta = th2;
                    omega = om2;
                }
            }
        }
        if (vio && vio->is(ViolationKind::RodBreak) && vio->starts(k) && !broken) {
            broken = true;
            Vec3 dir{std::sin(theta), -std::cos(theta), 0};
            bob_pos = pivot + dir * length;
            bob_vel = Vec3{std::cos(theta), std::sin(theta), 0} * (length * omega);
        }
        emit(t_k);
        t_prev = t_k;
    }
    return traj;
}

// --- optics -----------------------------------------------------------------

inline SceneTrajectory simulate_optics(const ScenarioSpec& spec, std::uint64_t seed,
                                       const SimViolation* vio) {
    (void)vio; // optical violations are shadow-override edits, applied later
    SceneTrajectory traj;
    traj.spec = spec;
    Rng rng(derive_seed(seed, 0x6f707469ULL));
    const bool use_box = spec.phys("use_box") > 0.5;
    const double size = spec.phys("size");
    const auto& colors = spec.appearance.object_colors;

    if (spec.scenario_id == ScenarioId::MovingShadow) {
        const double speed = spec.phys("speed") * rng.uniform(0.97, 1.03);
        const double x0 = spec.phys("start_x") + rng.uniform(-0.02, 0.02);
        for (int k = 0; k < spec.frame_count; ++k) {
            const double t = k * spec.frame_dt;
            SceneState s;
            s.sim_time = t;
            s.light_dir = spec.appearance.light_dir;
            Vec3 pos{x0 + speed * t, size, 0};
            RigidBodyState body = use_box
                                      ? detail::make_box(pos, {size, size, size}, 0, colors[0])
                                      : detail::make_sphere(pos, size, 0, colors[0]);
            body.vel = {speed, 0, 0};
            s.bodies = {body};
            traj.states.push_back(std::move(s));
        }
    } else { // OrbitShadow: static scene, orbiting camera
        const double orbit = deg2rad(spec.phys("orbit_deg")) * rng.uniform(0.97, 1.03);
        const CameraPose& base = spec.appearance.camera;
        Vec3 rel = base.position - base.look_at;
        for (int k = 0; k < spec.frame_count; ++k) {
            const double t = k * spec.frame_dt;
            const double ang = orbit * t / (spec.frame_count * spec.frame_dt);
            SceneState s;
            s.sim_time = t;
            s.light_dir = spec.appearance.light_dir;
            Vec3 pos{0, size, 0};
            RigidBodyState body = use_box
                                      ? detail::make_box(pos, {size, size, size}, 0, colors[0])
                                      : detail::make_sphere(pos, size, 0, colors[0]);
            s.bodies = {body};
            CameraPose cam = base;
            Quat q = Quat::from_axis_angle({0, 1, 0}, ang);
            cam.position = base.look_at + q.rotate(rel);
            s.camera_override = cam;
            traj.states.push_back(std::move(s));
        }
    }
    return traj;
}

} // namespace lpv::sim
