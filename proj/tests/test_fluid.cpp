#include <catch_amalgamated.hpp>

#include <cmath>

#include "lpv/sim/fluid.hpp"
#include "lpv/sim/simulate_soft.hpp"

using namespace lpv;
using namespace lpv::sim;

TEST_CASE("single particle in free space follows the closed ballistic form") {
    FluidState f;
    f.pos = {{0, 5.0, 0}};
    f.vel = {{0.3, 0, 0}};
    FluidParams p;
    FluidBounds bounds;
    bounds.lo = {-100, -100, -100};
    bounds.hi = {100, 100, 100};
    const double h = (1.0 / 24.0) / 4.0;
    const int steps = 4 * 24; // one second
    for (int i = 0; i < steps; ++i) step_fluid(f, h, p, bounds);
    const double t = steps * h;
    REQUIRE(f.pos[0].y == Catch::Approx(5.0 - 0.5 * 9.81 * t * t).margin(1e-6));
    REQUIRE(f.pos[0].x == Catch::Approx(0.3 * t).margin(1e-6));
    REQUIRE(f.vel[0].y == Catch::Approx(-9.81 * t).margin(1e-6));
}

TEST_CASE("valid fluid scenarios keep the particle count constant") {
    for (ScenarioId id : {ScenarioId::DropletFall, ScenarioId::FaucetFlow, ScenarioId::RiverFlow}) {
        ScenarioSpec spec = build_scenario_spec(id, 1234, 12);
        SceneTrajectory traj = simulate_scenario(spec, 5);
        REQUIRE(traj.states.front().fluid.has_value());
        const std::size_t n0 = traj.states.front().fluid->pos.size();
        for (const SceneState& s : traj.states) REQUIRE(s.fluid->pos.size() == n0);
    }
}

TEST_CASE("droplet particles stay inside the tank walls") {
    ScenarioSpec spec = build_scenario_spec(ScenarioId::DropletFall, 77, 16);
    SceneTrajectory traj = simulate_scenario(spec, 3);
    const double half = spec.phys("pool_half");
    for (const SceneState& s : traj.states)
        for (const Vec3& q : s.fluid->pos) {
            REQUIRE(q.x >= -half - 1e-6);
            REQUIRE(q.x <= half + 1e-6);
            REQUIRE(q.z >= -half - 1e-6);
            REQUIRE(q.z <= half + 1e-6);
            REQUIRE(q.y >= -1e-6);
        }
}

TEST_CASE("relaxation pushes a dense cluster apart") {
    FluidState f;
    Rng rng(5);
    for (int i = 0; i < 60; ++i)
        f.pos.push_back({rng.uniform(-0.02, 0.02), 0.5 + rng.uniform(-0.02, 0.02),
                         rng.uniform(-0.02, 0.02)});
    f.vel.assign(f.pos.size(), Vec3{});
    FluidParams p;
    p.gravity = 0.0;
    FluidBounds bounds;
    bounds.lo = {-5, -5, -5};
    bounds.hi = {5, 5, 5};
    auto mean_nn = [&] {
        double acc = 0;
        for (std::size_t i = 0; i < f.pos.size(); ++i) {
            double best = 1e9;
            for (std::size_t j = 0; j < f.pos.size(); ++j)
                if (i != j) best = std::min(best, (f.pos[i] - f.pos[j]).norm());
            acc += best;
        }
        return acc / static_cast<double>(f.pos.size());
    };
    const double before = mean_nn();
    for (int i = 0; i < 40; ++i) step_fluid(f, (1.0 / 24) / 4, p, bounds);
    REQUIRE(mean_nn() > before * 1.5);
}

TEST_CASE("fluid simulation is deterministic") {
    ScenarioSpec spec = build_scenario_spec(ScenarioId::FaucetFlow, 9, 10);
    SceneTrajectory a = simulate_scenario(spec, 2);
    SceneTrajectory b = simulate_scenario(spec, 2);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        const FluidState& fa = *a.states[k].fluid;
        const FluidState& fb = *b.states[k].fluid;
        REQUIRE(fa.pos.size() == fb.pos.size());
        for (std::size_t i = 0; i < fa.pos.size(); ++i) {
            REQUIRE(fa.pos[i].x == fb.pos[i].x);
            REQUIRE(fa.pos[i].y == fb.pos[i].y);
            REQUIRE(fa.pos[i].z == fb.pos[i].z);
        }
    }
}
