#include <catch_amalgamated.hpp>

#include <cmath>

#include "lpv/sim/rigid.hpp"

using namespace lpv;
using namespace lpv::sim;

TEST_CASE("integrate_ballistic: velocity kick then average-velocity advance") {
    RigidBodyState b;
    b.vel = {0, 0, 0};
    integrate_ballistic(b, 0.1, {0, -9.81, 0});
    REQUIRE(b.vel.y == Catch::Approx(-0.981).margin(1e-12));

    RigidBodyState c;
    c.pos = {0, 0, 0};
    c.vel = {1, 0, 0};
    integrate_ballistic(c, 0.5, {0, 0, 0});
    REQUIRE(c.pos.x == Catch::Approx(0.5).margin(1e-12));

    // constant-acceleration exactness
    RigidBodyState d;
    d.pos = {0, 2, 0};
    for (int i = 0; i < 100; ++i) integrate_ballistic(d, 0.005, {0, -9.81, 0});
    REQUIRE(d.pos.y == Catch::Approx(2.0 - 0.5 * 9.81 * 0.25).margin(1e-9));
}

TEST_CASE("resolve_collision: restitution semantics") {
    SECTION("e = 1, equal masses head-on: velocities swap") {
        RigidBodyState a, b;
        a.pos = {-0.1, 0, 0};
        b.pos = {0.1, 0, 0};
        a.vel = {1, 0, 0};
        b.vel = {-1, 0, 0};
        a.inv_mass = b.inv_mass = 1.0;
        resolve_collision(a, b, {-1, 0, 0}, 1.0);
        REQUIRE(a.vel.x == Catch::Approx(-1.0).margin(1e-12));
        REQUIRE(b.vel.x == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("e = 0: relative normal velocity becomes zero") {
        RigidBodyState a, b;
        a.vel = {2, 0, 0};
        b.vel = {-1, 0, 0};
        a.inv_mass = 1.0;
        b.inv_mass = 0.5;
        resolve_collision(a, b, {-1, 0, 0}, 0.0);
        REQUIRE((a.vel - b.vel).dot(Vec3{-1, 0, 0}) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("momentum conserved to 1e-9 relative") {
        RigidBodyState a, b;
        a.vel = {1.7, -0.3, 0.4};
        b.vel = {-0.9, 0.1, -0.2};
        a.inv_mass = 1.0 / 2.5;
        b.inv_mass = 1.0 / 1.2;
        Vec3 before = a.vel * a.mass() + b.vel * b.mass();
        Vec3 n = (a.pos - b.pos).norm() > 0 ? (a.pos - b.pos).normalized() : Vec3{1, 0, 0};
        resolve_collision(a, b, n, 0.8, 0.3);
        Vec3 after = a.vel * a.mass() + b.vel * b.mass();
        REQUIRE((after - before).norm() <= 1e-9 * before.norm());
    }
    SECTION("e = 0.5 sphere into plane rebounds at half speed") {
        RigidBodyState a;
        a.vel = {0, -2, 0};
        a.inv_mass = 1.0;
        resolve_plane_collision(a, {0, 1, 0}, 0.5);
        REQUIRE(a.vel.y == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("degenerate normal falls back to +y") {
    Vec3 n = contact_normal({0, 0, 0});
    REQUIRE(n.y == 1.0);
}

TEST_CASE("world: elastic bounce conserves energy across the impact frame") {
    RigidWorld w;
    w.restitution = 1.0;
    w.planes.push_back({{0, 1, 0}, 0.0, 0.0});
    RigidBodyState ball;
    ball.shape = ShapeType::Sphere;
    ball.half_extents = {0.1, 0.1, 0.1};
    ball.pos = {0, 1.0, 0};
    ball.inv_mass = 1.0;
    w.bodies.push_back(ball);

    auto energy = [&] { return w.kinetic_energy() + w.potential_energy(); };
    double e0 = energy();
    double emax = e0, emin = e0;
    double apex_after_bounce = 0;
    bool bounced = false;
    for (int k = 0; k < 30; ++k) {
        w.step_frame(1.0 / 24.0, 8);
        emax = std::max(emax, energy());
        emin = std::min(emin, energy());
        if (w.bodies[0].vel.y > 0) bounced = true;
        if (bounced) apex_after_bounce = std::max(apex_after_bounce, w.bodies[0].pos.y);
    }
    REQUIRE(emax <= e0 * (1 + 1e-9));
    // each bounce may lose O(g^2 h^2) to the contact-time approximation,
    // but never gains
    REQUIRE(emin >= e0 * (1 - 1e-3));
    REQUIRE(apex_after_bounce > 0.95); // e = 1 rebounds to the drop height
}

TEST_CASE("world: coulomb friction on an incline matches the closed form") {
    const double theta = deg2rad(30.0);
    const double mu = 0.2;
    RigidWorld w;
    w.planes.push_back({{std::sin(theta), std::cos(theta), 0}, 0.0, mu});
    RigidBodyState block;
    block.shape = ShapeType::Box;
    block.half_extents = {0.1, 0.05, 0.1};
    block.orient = Quat::from_axis_angle({0, 0, 1}, -theta);
    // place exactly on the plane
    Vec3 n{std::sin(theta), std::cos(theta), 0};
    block.pos = n * support_radius(block, n);
    block.inv_mass = 1.0;
    w.bodies.push_back(block);

    const double dt = 1.0 / 24.0;
    const int frames = 12;
    for (int k = 0; k < frames; ++k) w.step_frame(dt, 8);
    const double t = frames * dt;
    const double a_expect = 9.81 * (std::sin(theta) - mu * std::cos(theta)); // 3.206
    const double v = w.bodies[0].vel.norm();
    REQUIRE(a_expect == Catch::Approx(3.206).margin(5e-3));
    REQUIRE(v == Catch::Approx(a_expect * t).epsilon(0.01));
}

TEST_CASE("world: sphere-sphere impact at exact time of impact") {
    RigidWorld w;
    w.restitution = 1.0;
    w.gravity = {0, 0, 0};
    RigidBodyState a, b;
    a.shape = b.shape = ShapeType::Sphere;
    a.half_extents = b.half_extents = {0.1, 0.1, 0.1};
    a.pos = {-0.5, 0, 0};
    b.pos = {0.5, 0, 0};
    a.vel = {1, 0, 0};
    b.vel = {-1, 0, 0};
    a.inv_mass = b.inv_mass = 1.0;
    w.bodies = {a, b};
    std::vector<ImpactEvent> events;
    w.events = &events;
    for (int k = 0; k < 24; ++k) {
        w.current_frame = k;
        w.step_frame(1.0 / 24.0, 8);
        // spheres never interpenetrate
        double gap = (w.bodies[0].pos - w.bodies[1].pos).norm() - 0.2;
        REQUIRE(gap >= -1e-9);
    }
    REQUIRE(events.size() == 1);
    REQUIRE(w.bodies[0].vel.x == Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(w.bodies[1].vel.x == Catch::Approx(1.0).margin(1e-9));
    REQUIRE((events[0].post_momentum - events[0].pre_momentum).norm() < 1e-12);
}
