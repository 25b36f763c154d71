#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "lpv/sim/simulate_soft.hpp"

namespace lpv::sim {

namespace detail {

inline bool violation_needs_resim(ScenarioId id, ViolationKind k) {
    using V = ViolationKind;
    switch (k) {
        case V::OverRestitution:
        case V::InelasticStick:
        case V::Penetration:
        case V::PhantomForce:
        case V::SizeChange:
        case V::HoverNoContact:
        case V::ErraticMotion:
        case V::EnergyAmplify:
        case V::EnergyDamp:
        case V::AntiGravity:
        case V::HoleInStack:
        case V::RodBreak:
        case V::FrequencyVariation:
        case V::TimeFreeze:
        case V::RigidCloth:
        case V::ClothShatter:
        case V::StreamFragmentation:
        case V::MassCreation:
        case V::NegativeViscosity:
        case V::SelfAttraction:
        case V::PhaseShift:
        case V::InvisibleBarrier: return true;
        case V::MassVanish: return domain_of(id) == Domain::Fluid;
        case V::Teleport:
            return id == ScenarioId::BallCollision || id == ScenarioId::PyramidImpact;
        default: return false;
    }
}

inline Vec3 clamp_color(const Vec3& c) {
    return {clampd(c.x, 0.0, 1.0), clampd(c.y, 0.0, 1.0), clampd(c.z, 0.0, 1.0)};
}

inline double ramp01(int frame, int onset, int span) {
    return std::min(1.0, (frame - onset + 1) / static_cast<double>(std::max(1, span)));
}

// Horizontal direction the shadow extends toward (away from the light).
inline Vec3 shadow_side_dir(const Vec3& light_dir) {
    Vec3 h{light_dir.x, 0, light_dir.z};
    const double n = h.norm();
    return n > 1e-9 ? h / n : Vec3{1, 0, 0};
}

inline void edit_color_change(SceneTrajectory& traj, const SimViolation& vio) {
    const double shift = vio.mag("color_shift");
    for (int k = vio.onset; k < traj.frame_count(); ++k) {
        const double s = ramp01(k, vio.onset, 6) * shift;
        SceneState& st = traj.states[static_cast<std::size_t>(k)];
        auto shifted = [&](const Vec3& c) {
            return clamp_color(Vec3{c.z, c.x, c.y} * s + c * (1.0 - s) + Vec3{s * 0.25, 0, 0});
        };
        if (traj.spec.scenario_id == ScenarioId::ClothDrape && st.cloth)
            st.cloth->color = shifted(st.cloth->color);
        else if (traj.spec.scenario_id == ScenarioId::FaucetFlow && st.fluid)
            st.fluid->color = shifted(st.fluid->color);
        else if (!st.bodies.empty())
            st.bodies[0].color = shifted(st.bodies[0].color);
    }
}

inline void edit_teleport(SceneTrajectory& traj, const SimViolation& vio) {
    const double radii = vio.mag("teleport_radii");
    const ScenarioId id = traj.spec.scenario_id;
    if (id == ScenarioId::BallDrop) {
        const double r = traj.spec.phys("radius");
        const double sign = derive_seed(vio.seed, 7) % 2 == 0 ? 1.0 : -1.0;
        const Vec3 delta{sign * radii * r, 0, 0};
        for (int k = vio.onset; k < traj.frame_count(); ++k)
            traj.states[static_cast<std::size_t>(k)].bodies[0].pos += delta;
    } else if (id == ScenarioId::BlockSlide) {
        const double theta = deg2rad(traj.spec.phys("incline_deg"));
        const Vec3 slide_dir{std::cos(theta), -std::sin(theta), 0};
        const Vec3 delta = slide_dir * (radii * 2.0 * traj.spec.phys("half_x"));
        for (int k = vio.onset; k < traj.frame_count(); ++k)
            traj.states[static_cast<std::size_t>(k)].bodies[1].pos += delta;
    } else if (id == ScenarioId::FaucetFlow) {
        const double half = traj.spec.phys("tank_half");
        const std::size_t blob = 40;
        const double sign = derive_seed(vio.seed, 7) % 2 == 0 ? 1.0 : -1.0;
        for (int k = vio.onset; k < traj.frame_count(); ++k) {
            SceneState& st = traj.states[static_cast<std::size_t>(k)];
            if (!st.fluid) continue;
            const std::size_t m = std::min(blob, st.fluid->pos.size());
            for (std::size_t i = 0; i < m; ++i) {
                Vec3& p = st.fluid->pos[i];
                p.x = clampd(p.x + sign * 0.32, -half + 0.02, half - 0.02);
            }
        }
    } else if (id == ScenarioId::ClothWaving) {
        const double dz = vio.mag("cloth_teleport_dz");
        for (int k = vio.onset; k < traj.frame_count(); ++k) {
            SceneState& st = traj.states[static_cast<std::size_t>(k)];
            if (!st.cloth) continue;
            for (int j = 0; j < st.cloth->ny; ++j)
                for (int i = st.cloth->nx / 2; i < st.cloth->nx; ++i)
                    st.cloth->pos[static_cast<std::size_t>(st.cloth->idx(i, j))].z += dz;
        }
    } else {
        throw InapplicableViolation("teleport edit: unsupported scenario");
    }
}

inline void edit_temporal_disorder(SceneTrajectory& traj, const SimViolation& vio) {
    const int block = static_cast<int>(vio.mag("shuffle_block"));
    const int f = traj.frame_count();
    std::vector<std::pair<int, int>> blocks; // [begin, end)
    for (int b = vio.onset; b < f; b += block)
        blocks.emplace_back(b, std::min(f, b + block));
    if (blocks.size() < 2) throw OnsetOutOfRange("temporal disorder: too few frames after onset");
    std::vector<std::size_t> order(blocks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(vio.seed, 0x73687566ULL));
    rng.shuffle(order);
    bool identity = true;
    for (std::size_t i = 0; i < order.size(); ++i) identity &= order[i] == i;
    if (identity) std::swap(order[0], order[1]);

    std::vector<SceneState> shuffled;
    shuffled.reserve(static_cast<std::size_t>(f - vio.onset));
    for (std::size_t bi : order)
        for (int k = blocks[bi].first; k < blocks[bi].second; ++k)
            shuffled.push_back(traj.states[static_cast<std::size_t>(k)]);
    for (int k = vio.onset; k < f; ++k)
        traj.states[static_cast<std::size_t>(k)] = shuffled[static_cast<std::size_t>(k - vio.onset)];
}

inline void edit_jitter(SceneTrajectory& traj, const SimViolation& vio) {
    const double amp = vio.mag("jitter_amp");
    for (int k = vio.onset; k < traj.frame_count(); ++k) {
        const double sign = ((k - vio.onset) % 2 == 0) ? 1.0 : -1.0;
        // across-slope horizontal axis: z. Height stays constant.
        traj.states[static_cast<std::size_t>(k)].bodies[1].pos.z += sign * amp;
    }
}

inline void edit_mass_vanish_pendulum(SceneTrajectory& traj, const SimViolation& vio) {
    for (int k = vio.onset; k < traj.frame_count(); ++k) {
        if (((k - vio.onset) % 5) < 3) {
            RigidBodyState& bob = traj.states[static_cast<std::size_t>(k)].bodies[2];
            bob.visible = false;
            bob.casts_shadow = false;
        }
    }
}

inline void edit_path_deviation(SceneTrajectory& traj, const SimViolation& vio) {
    const double amp = vio.mag("path_deviation_amp");
    const Vec3 pivot{0, traj.spec.phys("pivot_height"), 0};
    for (int k = vio.onset; k < traj.frame_count(); ++k) {
        const double ramp = ramp01(k, vio.onset, 4);
        const double psi = amp * ramp * std::sin(0.9 * (k - vio.onset) + 0.6);
        Quat q = Quat::from_axis_angle({0, 1, 0}, psi);
        SceneState& st = traj.states[static_cast<std::size_t>(k)];
        for (std::size_t bi : {std::size_t(1), std::size_t(2)}) { // rod and bob
            RigidBodyState& b = st.bodies[bi];
            b.pos = pivot + q.rotate(b.pos - pivot);
            b.vel = q.rotate(b.vel);
            b.orient = (q * b.orient).normalized();
        }
    }
}

inline void edit_cloth_twist(SceneTrajectory& traj, const SimViolation& vio) {
    const double angle = vio.mag("twist_angle");
    const double y_c = traj.spec.phys("top_y") - traj.spec.phys("flag_h") / 2;
    for (int k = vio.onset; k < traj.frame_count(); ++k) {
        SceneState& st = traj.states[static_cast<std::size_t>(k)];
        if (!st.cloth) continue;
        ClothState& c = *st.cloth;
        const double s = ramp01(k, vio.onset, 6);
        for (int j = 0; j < c.ny; ++j)
            for (int i = 0; i < c.nx; ++i) {
                const double a = angle * s * i / (c.nx - 1);
                const double ca = std::cos(a), sa = std::sin(a);
                Vec3& p = c.pos[static_cast<std::size_t>(c.idx(i, j))];
                const double dy = p.y - y_c, dz = p.z;
                p.y = y_c + dy * ca - dz * sa;
                p.z = dy * sa + dz * ca;
                Vec3& v = c.vel[static_cast<std::size_t>(c.idx(i, j))];
                const double vy = v.y, vz = v.z;
                v.y = vy * ca - vz * sa;
                v.z = vy * sa + vz * ca;
            }
    }
}

inline void edit_cloth_explode(SceneTrajectory& traj, const SimViolation& vio) {
    const double target = vio.mag("cloth_explode_scale");
    Vec3 c0{0, 0, 0};
    {
        const ClothState& c = *traj.states[static_cast<std::size_t>(vio.onset)].cloth;
        for (const Vec3& p : c.pos) c0 += p;
        c0 = c0 / static_cast<double>(c.pos.size());
    }
    for (int k = vio.onset; k < traj.frame_count(); ++k) {
        const double s = 1.0 + (target - 1.0) * ramp01(k, vio.onset, 6);
        SceneState& st = traj.states[static_cast<std::size_t>(k)];
        if (!st.cloth) continue;
        for (std::size_t i = 0; i < st.cloth->pos.size(); ++i) {
            st.cloth->pos[i] = c0 + (st.cloth->pos[i] - c0) * s;
            st.cloth->vel[i] *= s;
        }
    }
}

inline void edit_impossible_fold(SceneTrajectory& traj, const SimViolation& vio) {
    // Fold the right half over the crease column by a per-row rotation;
    // row-local distances to the crease are preserved, so springs stay in
    // band while the crease itself becomes an impossibly sharp fold.
    const double max_angle = 2.93; // ~168 degrees
    const Vec3 support{traj.spec.phys("support_x"), traj.spec.phys("support_height"), 0};
    const double support_r = traj.spec.phys("support_radius");
    for (int k = vio.onset; k < traj.frame_count(); ++k) {
        SceneState& st = traj.states[static_cast<std::size_t>(k)];
        if (!st.cloth) continue;
        ClothState& c = *st.cloth;
        const int crease = c.nx / 2;
        const double a = max_angle * ramp01(k, vio.onset, 6);
        for (int j = 0; j < c.ny; ++j) {
            const Vec3 origin = c.pos[static_cast<std::size_t>(c.idx(crease, j))];
            // local crease direction from neighbors along the column
            const int j0 = std::max(0, j - 1), j1 = std::min(c.ny - 1, j + 1);
            Vec3 axis = (c.pos[static_cast<std::size_t>(c.idx(crease, j1))] -
                         c.pos[static_cast<std::size_t>(c.idx(crease, j0))])
                            .normalized();
            if (axis.norm2() < 0.5) axis = {0, 0, 1};
            // orient the axis so the folded half swings upward first
            Vec3 probe = c.pos[static_cast<std::size_t>(c.idx(std::min(c.nx - 1, crease + 1), j))] -
                         origin;
            if (axis.cross(probe).y < 0) axis = -axis;
            Quat q = Quat::from_axis_angle(axis, a);
            for (int i = crease + 1; i < c.nx; ++i) {
                Vec3& p = c.pos[static_cast<std::size_t>(c.idx(i, j))];
                p = origin + q.rotate(p - origin);
                Vec3& v = c.vel[static_cast<std::size_t>(c.idx(i, j))];
                v = q.rotate(v);
            }
        }
        // keep the folded layer out of the support and ground
        for (Vec3& p : c.pos) {
            Vec3 d = p - support;
            const double dist = d.norm();
            if (dist < support_r + 0.004 && dist > 1e-9)
                p = support + d * ((support_r + 0.004) / dist);
            if (p.y < 0.004) p.y = 0.004;
        }
    }
}

inline void edit_shadow_override(SceneTrajectory& traj, const SimViolation& vio) {
    using V = ViolationKind;
    for (int k = vio.onset; k < traj.frame_count(); ++k) {
        SceneState& st = traj.states[static_cast<std::size_t>(k)];
        ShadowOverride ov;
        ov.body_index = 0;
        switch (vio.kind) {
            case V::ShadowVanish:
                ov.mode = ShadowOverride::Mode::Vanish;
                st.shadow_override = ov;
                break;
            case V::ShadowInvert:
                ov.mode = ShadowOverride::Mode::Mirror;
                st.shadow_override = ov;
                break;
            case V::ShadowWithoutCaster:
                st.bodies[0].visible = false; // shadow still cast
                break;
            case V::CasterVanish: { // the shadow detaches and drifts away
                ov.mode = ShadowOverride::Mode::Offset;
                const double t = (k - vio.onset) * traj.spec.frame_dt;
                ov.offset = shadow_side_dir(st.light_dir) * (vio.mag("shadow_detach_rate") * t);
                st.shadow_override = ov;
                break;
            }
            case V::ShadowShapeMismatch:
                ov.mode = ShadowOverride::Mode::ShapeSwap;
                ov.stretch = vio.mag("shadow_stretch");
                ov.rotate = 1.5707963267948966;
                st.shadow_override = ov;
                break;
            case V::ShadowTeleport: {
                const bool jumped = (((k - vio.onset) / 3) % 2) == 1;
                if (jumped) {
                    ov.mode = ShadowOverride::Mode::Offset;
                    const double r = traj.spec.phys("size");
                    ov.offset = shadow_side_dir(st.light_dir) * (vio.mag("shadow_jump_radii") * r);
                    st.shadow_override = ov;
                }
                break;
            }
            default: throw InapplicableViolation("not a shadow violation");
        }
    }
}

} // namespace detail

// Applies exactly one controlled violation to a valid trajectory. Frames
// before the onset are bit-identical to the valid input; determinism in
// (kind, onset, seed) is inherited from the simulators and editors.
inline SceneTrajectory inject_violation(const SceneTrajectory& valid, ViolationKind kind,
                                        int onset_frame, std::uint64_t seed,
                                        const std::map<std::string, double>* magnitudes = nullptr) {
    const auto& applicable = applicable_violations(valid.spec.scenario_id);
    if (std::find(applicable.begin(), applicable.end(), kind) == applicable.end())
        throw InapplicableViolation(std::string("violation ") + to_string(kind) +
                                    " not applicable to " + to_string(valid.spec.scenario_id));
    if (onset_frame < 0 || onset_frame >= valid.frame_count())
        throw OnsetOutOfRange("onset outside the clip");

    SimViolation vio;
    vio.kind = kind;
    vio.onset = onset_frame;
    vio.seed = seed;
    vio.magnitudes = magnitudes;

    SceneTrajectory out;
    if (detail::violation_needs_resim(valid.spec.scenario_id, kind)) {
        out = simulate_scenario(valid.spec, valid.sim_seed, &vio);
    } else {
        out = valid;
        out.sim_seed = valid.sim_seed;
        using V = ViolationKind;
        switch (kind) {
            case V::ColorChange: detail::edit_color_change(out, vio); break;
            case V::Teleport: detail::edit_teleport(out, vio); break;
            case V::TemporalDisorder: detail::edit_temporal_disorder(out, vio); break;
            case V::Jitter: detail::edit_jitter(out, vio); break;
            case V::MassVanish: detail::edit_mass_vanish_pendulum(out, vio); break;
            case V::PathDeviation: detail::edit_path_deviation(out, vio); break;
            case V::ClothTwist180: detail::edit_cloth_twist(out, vio); break;
            case V::ClothExplode: detail::edit_cloth_explode(out, vio); break;
            case V::ImpossibleFold: detail::edit_impossible_fold(out, vio); break;
            case V::ShadowInvert:
            case V::ShadowVanish:
            case V::ShadowWithoutCaster:
            case V::CasterVanish:
            case V::ShadowShapeMismatch:
            case V::ShadowTeleport: detail::edit_shadow_override(out, vio); break;
            default: throw InapplicableViolation("unhandled violation edit");
        }
    }
    out.violation = ViolationTag{kind, onset_frame, {}};
    return out;
}

} // namespace lpv::sim
