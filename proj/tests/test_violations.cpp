#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "lpv/sim/pair_group.hpp"

using namespace lpv;
using namespace lpv::sim;

namespace {
bool states_equal(const SceneState& a, const SceneState& b) {
    if (a.sim_time != b.sim_time || a.bodies.size() != b.bodies.size()) return false;
    for (std::size_t i = 0; i < a.bodies.size(); ++i) {
        const auto& x = a.bodies[i];
        const auto& y = b.bodies[i];
        if ((x.pos - y.pos).norm() != 0.0 || (x.vel - y.vel).norm() != 0.0) return false;
        if ((x.half_extents - y.half_extents).norm() != 0.0) return false;
        if ((x.color - y.color).norm() != 0.0 || x.visible != y.visible) return false;
    }
    if (a.cloth.has_value() != b.cloth.has_value()) return false;
    if (a.cloth) {
        if ((a.cloth->color - b.cloth->color).norm() != 0.0) return false;
        for (std::size_t i = 0; i < a.cloth->pos.size(); ++i)
            if ((a.cloth->pos[i] - b.cloth->pos[i]).norm() != 0.0) return false;
    }
    if (a.fluid.has_value() != b.fluid.has_value()) return false;
    if (a.fluid) {
        if (a.fluid->pos.size() != b.fluid->pos.size()) return false;
        if ((a.fluid->color - b.fluid->color).norm() != 0.0) return false;
        for (std::size_t i = 0; i < a.fluid->pos.size(); ++i)
            if ((a.fluid->pos[i] - b.fluid->pos[i]).norm() != 0.0) return false;
    }
    if (a.shadow_override.has_value() != b.shadow_override.has_value()) return false;
    return true;
}
} // namespace

TEST_CASE("prefix identity holds for every violation kind of every scenario") {
    for (int sc = 0; sc < kScenarioCount; ++sc) {
        const ScenarioId id = static_cast<ScenarioId>(sc);
        ScenarioSpec spec = build_scenario_spec(id, variation_seed(4242, id, 0), 16);
        SceneTrajectory valid = simulate_scenario(spec, 1);
        for (ViolationKind kind : applicable_violations(id)) {
            INFO(std::string(to_string(id)) + " / " + to_string(kind));
            const std::uint64_t vseed = derive_seed(7, static_cast<std::uint64_t>(kind));
            const int onset = choose_onset(kind, valid, vseed);
            REQUIRE(onset > 0);
            SceneTrajectory invalid = inject_violation(valid, kind, onset, vseed);
            REQUIRE(invalid.frame_count() == valid.frame_count());
            REQUIRE(invalid.violation.has_value());
            REQUIRE(invalid.violation->kind == kind);
            for (int k = 0; k < onset; ++k)
                REQUIRE(states_equal(valid.states[static_cast<std::size_t>(k)],
                                     invalid.states[static_cast<std::size_t>(k)]));
            // and the trajectory actually differs somewhere at/after onset
            bool differs = false;
            for (int k = onset; k < valid.frame_count() && !differs; ++k)
                differs = !states_equal(valid.states[static_cast<std::size_t>(k)],
                                        invalid.states[static_cast<std::size_t>(k)]);
            REQUIRE(differs);
        }
    }
}

TEST_CASE("violations are deterministic in (kind, onset, seed)") {
    ScenarioSpec spec = build_scenario_spec(ScenarioId::PyramidImpact,
                                            variation_seed(1, ScenarioId::PyramidImpact, 2), 16);
    SceneTrajectory valid = simulate_scenario(spec, 3);
    SceneTrajectory a = inject_violation(valid, ViolationKind::EnergyAmplify, 8, 5);
    SceneTrajectory b = inject_violation(valid, ViolationKind::EnergyAmplify, 8, 5);
    for (int k = 0; k < a.frame_count(); ++k)
        REQUIRE(states_equal(a.states[static_cast<std::size_t>(k)],
                             b.states[static_cast<std::size_t>(k)]));
}

TEST_CASE("over-restitution: rebound apex exceeds the drop height") {
    ScenarioSpec spec = build_scenario_spec(ScenarioId::BallDrop,
                                            variation_seed(11, ScenarioId::BallDrop, 0), 20);
    SceneTrajectory valid = simulate_scenario(spec, 1);
    const std::uint64_t vseed = 99;
    const int onset = choose_onset(ViolationKind::OverRestitution, valid, vseed);
    SceneTrajectory invalid = inject_violation(valid, ViolationKind::OverRestitution, onset, vseed);

    const double start_y = valid.states[0].bodies[0].pos.y;
    double valid_apex = 0, invalid_apex = 0;
    bool after_bounce = false;
    for (int k = onset; k < valid.frame_count(); ++k) {
        if (valid.states[static_cast<std::size_t>(k)].bodies[0].vel.y > 0) after_bounce = true;
        if (after_bounce) {
            valid_apex = std::max(valid_apex, valid.states[static_cast<std::size_t>(k)].bodies[0].pos.y);
            invalid_apex =
                std::max(invalid_apex, invalid.states[static_cast<std::size_t>(k)].bodies[0].pos.y);
        }
    }
    REQUIRE(invalid_apex > start_y);      // higher than gravity permits
    REQUIRE(valid_apex < start_y);        // the valid bounce stays below
    REQUIRE(invalid_apex > valid_apex * 1.3);
}

TEST_CASE("temporal disorder permutes frames without changing the multiset") {
    ScenarioSpec spec = build_scenario_spec(ScenarioId::MovingShadow,
                                            variation_seed(5, ScenarioId::MovingShadow, 1), 16);
    SceneTrajectory valid = simulate_scenario(spec, 2);
    const int onset = 6;
    SceneTrajectory invalid = inject_violation(valid, ViolationKind::TemporalDisorder, onset, 3);

    // multiset of sim_times is unchanged; order is not
    std::vector<double> tv, ti;
    for (int k = onset; k < valid.frame_count(); ++k) {
        tv.push_back(valid.states[static_cast<std::size_t>(k)].sim_time);
        ti.push_back(invalid.states[static_cast<std::size_t>(k)].sim_time);
    }
    REQUIRE(!std::is_sorted(ti.begin(), ti.end()));
    std::sort(ti.begin(), ti.end());
    REQUIRE(tv == ti);
}

TEST_CASE("mass creation grows the particle count by spawn_rate per frame") {
    ScenarioSpec spec = build_scenario_spec(ScenarioId::FaucetFlow,
                                            variation_seed(8, ScenarioId::FaucetFlow, 3), 16);
    SceneTrajectory valid = simulate_scenario(spec, 1);
    const int onset = 6;
    SceneTrajectory invalid = inject_violation(valid, ViolationKind::MassCreation, onset, 17);
    const std::size_t n0 = valid.states[0].fluid->pos.size();
    const int spawn = static_cast<int>(default_magnitudes().at("spawn_rate"));
    for (int k = 0; k < invalid.frame_count(); ++k) {
        const std::size_t expect =
            k < onset ? n0 : n0 + static_cast<std::size_t>(spawn * (k - onset + 1));
        REQUIRE(invalid.states[static_cast<std::size_t>(k)].fluid->pos.size() == expect);
    }
    // strictly increasing after onset
    for (int k = onset; k < invalid.frame_count(); ++k)
        REQUIRE(invalid.states[static_cast<std::size_t>(k)].fluid->pos.size() >
                invalid.states[static_cast<std::size_t>(k - 1)].fluid->pos.size());
}

TEST_CASE("inapplicable violations and bad onsets are rejected") {
    ScenarioSpec spec = build_scenario_spec(ScenarioId::BallDrop,
                                            variation_seed(2, ScenarioId::BallDrop, 0), 16);
    SceneTrajectory valid = simulate_scenario(spec, 1);
    REQUIRE_THROWS_AS(inject_violation(valid, ViolationKind::ShadowVanish, 8, 1),
                      InapplicableViolation);
    REQUIRE_THROWS_AS(inject_violation(valid, ViolationKind::Teleport, 16, 1), OnsetOutOfRange);
    REQUIRE_THROWS_AS(inject_violation(valid, ViolationKind::Teleport, -1, 1), OnsetOutOfRange);
}
