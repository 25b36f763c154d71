#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "lpv/core/hash.hpp"
#include "lpv/core/math.hpp"
#include "lpv/core/rng.hpp"
#include "lpv/core/tensor.hpp"

using namespace lpv;

TEST_CASE("derive_seed is stable and sensitive to every label") {
    REQUIRE(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    REQUIRE(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    REQUIRE(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
    REQUIRE(seen.size() == 1000);
}

TEST_CASE("counter normals are order-free and unit variance") {
    const std::uint64_t key = derive_seed(7, 1);
    REQUIRE(counter_normal(key, 5) == counter_normal(key, 5));

    double sum = 0, sum2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double z = counter_normal(key, static_cast<std::uint64_t>(i));
        sum += z;
        sum2 += z * z;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    REQUIRE(std::abs(mean) < 0.01);
    REQUIRE(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("rng shuffle is deterministic per seed") {
    std::vector<int> a{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> b = a;
    Rng r1(99), r2(99);
    r1.shuffle(a);
    r2.shuffle(b);
    REQUIRE(a == b);
}

TEST_CASE("tensor indexing matches W-fastest layout") {
    TensorF t(2, 3, 4, 5);
    t(1, 2, 3, 4) = 1.5f;
    REQUIRE(t[((1 * 3 + 2) * 4 + 3) * 5 + 4] == 1.5f);
    REQUIRE(t.size() == 2u * 3u * 4u * 5u);
}

TEST_CASE("frame resampling uses floor(j*F/F')") {
    TensorF t(8, 1, 1, 1);
    for (std::size_t f = 0; f < 8; ++f) t(f, 0, 0, 0) = static_cast<float>(f);
    TensorF half = resample_frames(t, std::size_t(4));
    REQUIRE(half.f() == 4);
    REQUIRE(half(0, 0, 0, 0) == 0.0f);
    REQUIRE(half(1, 0, 0, 0) == 2.0f);
    REQUIRE(half(2, 0, 0, 0) == 4.0f);
    REQUIRE(half(3, 0, 0, 0) == 6.0f);
    TensorF same = resample_frames(t, std::size_t(8));
    REQUIRE(same.vec() == t.vec());
}

TEST_CASE("bilinear spatial resampling preserves constant images") {
    TensorF t(1, 1, 8, 8);
    for (auto& v : t.vec()) v = 0.625f;
    TensorF small = resample_spatial(t, std::size_t(5), std::size_t(3));
    for (auto v : small.vec()) REQUIRE(v == Catch::Approx(0.625).margin(1e-6));
}

TEST_CASE("fnv1a64 reference value") {
    // FNV-1a("a") per the published constants.
    REQUIRE(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("quaternion rotation") {
    Quat q = Quat::from_axis_angle({0, 1, 0}, 3.14159265358979 / 2);
    Vec3 v = q.rotate({1, 0, 0});
    REQUIRE(v.x == Catch::Approx(0).margin(1e-12));
    REQUIRE(v.z == Catch::Approx(-1).margin(1e-12));
    REQUIRE(q.norm() == Catch::Approx(1.0).margin(1e-12));
}
