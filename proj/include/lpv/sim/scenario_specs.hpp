#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "lpv/core/rng.hpp"
#include "lpv/sim/types.hpp"

namespace lpv::sim {

// Violations applicable per scenario, one clip per entry in the default
// dataset. Transcribed per scenario family; exported in the README.
inline const std::vector<ViolationKind>& applicable_violations(ScenarioId id) {
    using V = ViolationKind;
    static const std::vector<V> ball_collision{
        V::InelasticStick, V::OverRestitution, V::Penetration, V::PhantomForce,
        V::SizeChange,     V::Teleport,        V::TemporalDisorder};
    static const std::vector<V> ball_drop{V::ColorChange, V::SizeChange, V::OverRestitution,
                                          V::Penetration, V::Teleport,   V::TemporalDisorder};
    static const std::vector<V> block_slide{V::HoverNoContact, V::ErraticMotion,
                                            V::Jitter,         V::SizeChange,
                                            V::Teleport,       V::TemporalDisorder};
    static const std::vector<V> pendulum{V::RodBreak, V::MassVanish, V::PathDeviation,
                                         V::TimeFreeze, V::FrequencyVariation};
    static const std::vector<V> pyramid{V::EnergyAmplify, V::EnergyDamp, V::HoleInStack,
                                        V::Teleport, V::AntiGravity};
    static const std::vector<V> cloth_drape{V::ColorChange, V::Penetration, V::ImpossibleFold,
                                            V::RigidCloth, V::TemporalDisorder};
    static const std::vector<V> cloth_waving{V::TimeFreeze,    V::ClothShatter,
                                             V::Teleport,      V::ClothTwist180,
                                             V::ClothExplode,  V::TemporalDisorder};
    static const std::vector<V> droplet{V::AntiGravity,   V::StreamFragmentation,
                                        V::MassCreation,  V::MassVanish,
                                        V::NegativeViscosity, V::SelfAttraction,
                                        V::TemporalDisorder};
    static const std::vector<V> faucet{V::ColorChange,   V::StreamFragmentation,
                                       V::NegativeViscosity, V::MassCreation,
                                       V::PhaseShift,    V::SelfAttraction,
                                       V::Teleport,      V::TemporalDisorder};
    static const std::vector<V> river{V::StreamFragmentation, V::InvisibleBarrier,
                                      V::MassVanish, V::PhaseShift, V::TemporalDisorder};
    static const std::vector<V> moving_shadow{V::ShadowInvert,        V::ShadowVanish,
                                              V::ShadowWithoutCaster, V::ShadowShapeMismatch,
                                              V::ShadowTeleport,      V::TemporalDisorder};
    static const std::vector<V> orbit_shadow{V::ShadowInvert, V::ShadowVanish,
                                             V::CasterVanish, V::ShadowShapeMismatch,
                                             V::ShadowTeleport, V::TemporalDisorder};
    switch (id) {
        case ScenarioId::BallCollision: return ball_collision;
        case ScenarioId::BallDrop: return ball_drop;
        case ScenarioId::BlockSlide: return block_slide;
        case ScenarioId::PendulumOscillation: return pendulum;
        case ScenarioId::PyramidImpact: return pyramid;
        case ScenarioId::ClothDrape: return cloth_drape;
        case ScenarioId::ClothWaving: return cloth_waving;
        case ScenarioId::DropletFall: return droplet;
        case ScenarioId::FaucetFlow: return faucet;
        case ScenarioId::RiverFlow: return river;
        case ScenarioId::MovingShadow: return moving_shadow;
        case ScenarioId::OrbitShadow: return orbit_shadow;
    }
    return ball_drop;
}

// Fixed defaults for violation magnitudes; a generation config may override
// any entry by key.
inline const std::map<std::string, double>& default_magnitudes() {
    static const std::map<std::string, double> m{
        {"over_restitution", 1.4},   {"inelastic_stick", 0.0},
        {"energy_amplify", 2.0},     {"energy_damp", 0.05},
        {"size_change", 1.6},        {"size_ramp_frames", 8},
        {"teleport_radii", 2.0},     {"color_shift", 0.45},
        {"hover_gap", 0.12},         {"jitter_amp", 0.11},
        {"erratic_period", 5},       {"phantom_angle", 1.2},
        {"shuffle_block", 4},        {"freeze_frames", 3},
        {"run_frames", 3},           {"gravity_mod_low", 0.35},
        {"path_deviation_amp", 0.6}, {"antigravity_scale", -0.6},
        {"spawn_rate", 6},           {"vanish_fraction", 0.28},
        {"negative_viscosity", -0.9},{"self_attraction", 2.6},
        {"fragment_clusters", 4},    {"fragment_drift", 1.4},
        {"cloth_explode_scale", 1.6},{"cloth_teleport_dz", 0.18},
        {"twist_angle", 3.14159265358979},
        {"shatter_cracks", 3},       {"shadow_detach_rate", 0.5},
        {"shadow_jump_radii", 2.2},  {"shadow_stretch", 3.0}};
    return m;
}

inline double magnitude_of(const std::map<std::string, double>* overrides, const char* key) {
    if (overrides) {
        auto it = overrides->find(key);
        if (it != overrides->end()) return it->second;
    }
    const auto& d = default_magnitudes();
    auto it = d.find(key);
    if (it == d.end()) throw ConfigParseError(std::string("unknown magnitude key: ") + key);
    return it->second;
}

namespace detail {

inline Vec3 hsv_to_rgb(double h, double s, double v) {
    h = h - std::floor(h);
    double i = std::floor(h * 6.0);
    double f = h * 6.0 - i;
    double p = v * (1 - s), q = v * (1 - f * s), t = v * (1 - (1 - f) * s);
    switch (static_cast<int>(i) % 6) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

// Scene framing per scenario: center and bounding radius for the camera.
inline void scene_frame(ScenarioId id, const std::map<std::string, double>& phys, Vec3& center,
                        double& radius) {
    switch (id) {
        case ScenarioId::BallCollision: center = {0, 0.35, 0}; radius = 1.15; break;
        case ScenarioId::BallDrop: {
            double h0 = phys.at("drop_height");
            center = {0, h0 * 0.75, 0};
            radius = h0 * 1.25 + 0.3;
            break;
        }
        case ScenarioId::BlockSlide: center = {0.45, 0.62, 0}; radius = 1.5; break;
        case ScenarioId::PendulumOscillation: {
            double pivot = phys.at("pivot_height");
            double len = phys.at("length");
            center = {0, pivot - 0.5 * len, 0};
            radius = len * 1.35 + 0.25;
            break;
        }
        case ScenarioId::PyramidImpact: center = {0, 0.55, 0}; radius = 1.35; break;
        case ScenarioId::ClothDrape: center = {0, 0.42, 0}; radius = 1.05; break;
        case ScenarioId::ClothWaving: center = {0.42, 1.05, 0}; radius = 1.0; break;
        case ScenarioId::DropletFall: center = {0, 0.45, 0}; radius = 1.15; break;
        case ScenarioId::FaucetFlow: center = {0, 0.55, 0}; radius = 1.25; break;
        case ScenarioId::RiverFlow: center = {0, 0.25, 0}; radius = 1.45; break;
        case ScenarioId::MovingShadow: center = {0, 0.3, 0}; radius = 1.5; break;
        case ScenarioId::OrbitShadow: center = {0, 0.3, 0}; radius = 1.3; break;
    }
}

} // namespace detail

// Deterministic scenario instantiation: one variation seed fixes every
// physics parameter and every visual factor.
inline ScenarioSpec build_scenario_spec(ScenarioId id, std::uint64_t variation_seed,
                                        int frame_count = 16, double frame_dt = 1.0 / 24.0) {
    if (frame_count < 8) throw ConfigParseError("frame_count must be >= 8");
    ScenarioSpec spec;
    spec.scenario_id = id;
    spec.domain = domain_of(id);
    spec.frame_count = frame_count;
    spec.frame_dt = frame_dt;
    spec.substeps = 8;

    Rng rng(derive_seed(variation_seed, 0x73706563ULL, static_cast<std::uint64_t>(id)));
    auto& phys = spec.physics;
    const double clip_time = frame_count * frame_dt;
    // Mid-clip contact time used to size drops and approaches.
    const double t_hit = 0.45 * clip_time;

    switch (id) {
        case ScenarioId::BallCollision: {
            phys["radius"] = rng.uniform(0.15, 0.2);
            phys["speed"] = rng.uniform(0.9, 1.3);
            phys["restitution"] = 1.0;
            phys["gap"] = 2.0 * phys["speed"] * t_hit; // center distance at start minus 2r
            phys["gravity"] = 9.81;
            break;
        }
        case ScenarioId::BallDrop: {
            phys["radius"] = rng.uniform(0.12, 0.17);
            phys["gravity"] = 9.81;
            phys["restitution"] = rng.uniform(0.78, 0.88);
            phys["drop_height"] = 0.5 * 9.81 * t_hit * t_hit * rng.uniform(0.96, 1.04);
            break;
        }
        case ScenarioId::BlockSlide: {
            phys["incline_deg"] = rng.uniform(27.0, 34.0);
            phys["mu"] = rng.uniform(0.10, 0.22);
            phys["half_x"] = rng.uniform(0.10, 0.14);
            phys["half_y"] = rng.uniform(0.08, 0.11);
            phys["half_z"] = rng.uniform(0.10, 0.14);
            phys["gravity"] = 9.81;
            phys["slide_start"] = rng.uniform(0.0, 0.1); // offset up the slope
            break;
        }
        case ScenarioId::PendulumOscillation: {
            phys["length"] = rng.uniform(0.75, 1.0);
            phys["gravity"] = 9.81;
            phys["theta0"] = rng.uniform(0.38, 0.58);
            phys["pivot_height"] = phys["length"] + rng.uniform(0.45, 0.6);
            phys["bob_radius"] = rng.uniform(0.085, 0.115);
            break;
        }
        case ScenarioId::PyramidImpact: {
            phys["sphere_radius"] = rng.uniform(0.13, 0.16);
            phys["cube_half"] = rng.uniform(0.10, 0.13);
            phys["restitution"] = rng.uniform(0.68, 0.78);
            phys["gravity"] = 9.81;
            phys["drop_gap"] = 0.5 * 9.81 * t_hit * t_hit; // cube face to top sphere
            break;
        }
        case ScenarioId::ClothDrape: {
            phys["cloth_size"] = rng.uniform(0.8, 0.95);
            phys["grid_n"] = 13;
            phys["support_radius"] = rng.uniform(0.22, 0.28);
            phys["support_x"] = rng.uniform(-0.1, -0.02); // slight asymmetry
            phys["support_height"] = 0.45;
            phys["start_height"] = 0.72;
            phys["gravity"] = 9.81;
            break;
        }
        case ScenarioId::ClothWaving: {
            phys["flag_w"] = rng.uniform(0.75, 0.9);
            phys["flag_h"] = rng.uniform(0.45, 0.55);
            phys["grid_nx"] = 13;
            phys["grid_ny"] = 9;
            phys["pole_x"] = 0.0;
            phys["top_y"] = rng.uniform(1.25, 1.4);
            phys["wind_base"] = rng.uniform(2.2, 3.2);
            phys["wind_gust"] = rng.uniform(0.8, 1.4);
            phys["wind_freq"] = rng.uniform(1.6, 2.4);
            phys["gravity"] = 9.81;
            break;
        }
        case ScenarioId::DropletFall: {
            phys["blob_radius"] = rng.uniform(0.10, 0.13);
            phys["blob_height"] = 0.5 * 9.81 * t_hit * t_hit + 0.16; // splash mid-clip
            phys["blob_particles"] = 320;
            phys["pool_particles"] = 260;
            phys["pool_half"] = 0.42;
            phys["gravity"] = 9.81;
            break;
        }
        case ScenarioId::FaucetFlow: {
            phys["spout_height"] = rng.uniform(0.85, 1.0);
            phys["tank_half"] = 0.45;
            phys["stream_particles"] = 150;
            phys["pool_particles"] = 420;
            phys["queue_size"] = 14;
            phys["gravity"] = 9.81;
            break;
        }
        case ScenarioId::RiverFlow: {
            phys["channel_half_x"] = 1.2;
            phys["channel_half_z"] = rng.uniform(0.3, 0.38);
            phys["particles"] = 540;
            phys["current"] = rng.uniform(0.75, 1.0);
            phys["drive"] = 0.9; // downstream forcing, m/s^2
            phys["rock_x"] = rng.uniform(-0.25, 0.15);
            phys["gravity"] = 9.81;
            break;
        }
        case ScenarioId::MovingShadow: {
            phys["use_box"] = rng.uniform() < 0.5 ? 1.0 : 0.0;
            phys["size"] = rng.uniform(0.16, 0.22);
            phys["speed"] = rng.uniform(0.8, 1.1);
            phys["start_x"] = -0.5 * phys["speed"] * clip_time;
            break;
        }
        case ScenarioId::OrbitShadow: {
            phys["use_box"] = rng.uniform() < 0.5 ? 1.0 : 0.0;
            phys["size"] = rng.uniform(0.18, 0.24);
            phys["orbit_deg"] = rng.uniform(65.0, 95.0);
            break;
        }
    }

    // Appearance: palette, ground, camera, light. All seeded.
    AppearanceParams& ap = spec.appearance;
    for (int i = 0; i < 4; ++i)
        ap.object_colors.push_back(
            detail::hsv_to_rgb(rng.uniform(), rng.uniform(0.5, 0.85), rng.uniform(0.65, 0.95)));
    double gbase = rng.uniform(0.42, 0.6);
    Vec3 tint = detail::hsv_to_rgb(rng.uniform(), 0.12, 1.0);
    ap.ground_color_a = tint * gbase;
    ap.ground_color_b = tint * (gbase - rng.uniform(0.14, 0.2));
    ap.checker_cell = rng.uniform(0.4, 0.65);
    ap.checker_id = static_cast<int>(rng.below(1u << 16));
    ap.background = detail::hsv_to_rgb(rng.uniform(0.52, 0.64), rng.uniform(0.1, 0.3),
                                       rng.uniform(0.75, 0.92));

    Vec3 center;
    double radius = 1.0;
    detail::scene_frame(id, phys, center, radius);
    const double az = rng.uniform(-0.45, 0.45) +
                      (id == ScenarioId::BlockSlide ? 0.35 : 0.0); // keep slope profile visible
    const double el = rng.uniform(0.28, 0.5);
    const double dist = radius / std::tan(deg2rad(21.0)) * rng.uniform(0.98, 1.12);
    ap.camera.look_at = center;
    ap.camera.position = center + Vec3{dist * std::cos(el) * std::sin(az), dist * std::sin(el),
                                       dist * std::cos(el) * std::cos(az)};
    ap.camera.vfov_deg = 42.0;

    const double laz = rng.uniform(0, 6.283185307179586);
    const double lel = deg2rad(rng.uniform(38.0, 56.0));
    ap.light_dir = Vec3{-std::cos(lel) * std::sin(laz), -std::sin(lel),
                        -std::cos(lel) * std::cos(laz)}
                       .normalized();
    return spec;
}

// Onset frame for a violation: the first recorded impact for the
// impact-anchored kinds, otherwise a seeded draw from the middle third.
inline int choose_onset(ViolationKind kind, const SceneTrajectory& valid, std::uint64_t seed) {
    const int f = valid.frame_count();
    const int third = f / 3;
    using V = ViolationKind;
    if (kind == V::OverRestitution || kind == V::InelasticStick || kind == V::PhantomForce ||
        kind == V::EnergyAmplify || kind == V::EnergyDamp) {
        for (const ImpactEvent& ev : valid.events)
            if (ev.pre_rel_normal_speed > 0.2) return std::max(1, ev.frame);
        return third; // no qualifying impact; fall back to the middle third
    }
    int onset = third + static_cast<int>(derive_seed(seed, 0x6f6e7365ULL,
                                                     static_cast<std::uint64_t>(kind)) %
                                         static_cast<std::uint64_t>(std::max(1, third)));
    if (kind == V::TemporalDisorder) onset = std::min(onset, f - 8);
    return std::max(1, std::min(onset, f - 2));
}

} // namespace lpv::sim
