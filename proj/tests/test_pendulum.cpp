#include <catch_amalgamated.hpp>

#include <cmath>

#include "lpv/sim/pendulum.hpp"

using namespace lpv::sim;

namespace {
// Independent fine-step RK4 oracle over a callable acceleration; used to
// freeze expected values for the coarse-step implementation.
std::pair<double, double> fine_rk4(double theta, double omega, double t_end, double g, double l,
                                   int steps) {
    const double h = t_end / steps;
    for (int i = 0; i < steps; ++i) {
        auto [t2, w2] = pendulum_step(theta, omega, h, g, l);
        theta = t2;
        omega = w2;
    }
    return {theta, omega};
}
} // namespace

TEST_CASE("equilibria are exact fixed points") {
    auto [t1, w1] = pendulum_step(0.0, 0.0, 1.0 / 24, 9.81, 1.0);
    REQUIRE(t1 == 0.0);
    REQUIRE(w1 == 0.0);
    const double pi = 3.14159265358979323846;
    auto [t2, w2] = pendulum_step(pi, 0.0, 1.0 / 24, 9.81, 1.0);
    REQUIRE(t2 == Catch::Approx(pi).margin(1e-12));
    REQUIRE(w2 == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("small-amplitude period within 1% of the harmonic value") {
    // L = 1, g = 9.81, amplitude 5 degrees: T ~ 2.006 s
    const double g = 9.81, l = 1.0;
    double theta = 5.0 * 3.14159265358979 / 180.0, omega = 0.0;
    const double h = (1.0 / 24.0) / 8.0;
    double t = 0;
    int crossings = 0;
    double first_cross = 0, last_cross = 0;
    double prev = theta;
    for (int i = 0; i < 40000 && crossings < 7; ++i) {
        auto [t2, w2] = pendulum_step(theta, omega, h, g, l);
        theta = t2;
        omega = w2;
        t += h;
        if (prev > 0 && theta <= 0) {
            if (crossings == 0) first_cross = t;
            last_cross = t;
            ++crossings;
        }
        prev = theta;
    }
    REQUIRE(crossings == 7);
    const double period = (last_cross - first_cross) / 6.0;
    REQUIRE(period == Catch::Approx(2.006).epsilon(0.01));
}

TEST_CASE("amplitude is preserved: max |theta| = theta0 within 1e-3") {
    // oracle: fine-dt RK4 of the same ODE, 100x finer
    const double g = 9.81, l = 1.0, theta0 = 0.1;
    auto probe = [&](int steps_per_frame) {
        double theta = theta0, omega = 0.0, max_abs = 0.0;
        const double h = (1.0 / 24.0) / steps_per_frame;
        for (int i = 0; i < steps_per_frame * 24 * 3; ++i) { // ~3 s, one+ period
            auto [t2, w2] = pendulum_step(theta, omega, h, g, l);
            theta = t2;
            omega = w2;
            max_abs = std::max(max_abs, std::abs(theta));
        }
        return max_abs;
    };
    const double coarse = probe(8);
    const double fine = probe(800);
    REQUIRE(coarse == Catch::Approx(theta0).margin(1e-3));
    REQUIRE(std::abs(coarse - fine) < 1e-4);
}

TEST_CASE("energy drift over 60 frames stays below 0.5%") {
    const double g = 9.81, l = 0.9;
    double theta = 0.5, omega = 0.0;
    const double e0 = pendulum_energy(theta, omega, g, l);
    const double h = (1.0 / 24.0) / 8.0;
    double worst = 0;
    for (int i = 0; i < 60 * 8; ++i) {
        auto [t2, w2] = pendulum_step(theta, omega, h, g, l);
        theta = t2;
        omega = w2;
        worst = std::max(worst, std::abs(pendulum_energy(theta, omega, g, l) - e0));
    }
    REQUIRE(worst / std::abs(e0) < 0.005);
}

TEST_CASE("fine-step cross-check is self-consistent") {
    auto [th, om] = fine_rk4(0.4, 0.0, 1.0, 9.81, 1.0, 5000);
    auto [th2, om2] = fine_rk4(0.4, 0.0, 1.0, 9.81, 1.0, 10000);
    REQUIRE(th == Catch::Approx(th2).margin(1e-9));
    REQUIRE(om == Catch::Approx(om2).margin(1e-9));
}
