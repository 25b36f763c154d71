#include <catch_amalgamated.hpp>

#include "lpv/diffusion/loss.hpp"
#include "lpv/nn/synthetic.hpp"
#include "lpv/nn/tiny.hpp"

using namespace lpv;
using namespace lpv::nn;

namespace {
TinyArch small_arch() {
    TinyArch a;
    a.total_steps = 50;
    a.num_labels = 4;
    a.embed_dim = 8;
    a.widths = {6, 6};
    a.frames = 4;
    a.height = 8;
    a.width = 8;
    return a;
}

TensorF noisy_input(std::uint64_t seed, std::size_t f, std::size_t h, std::size_t w) {
    TensorF t(f, 3, h, w);
    diffusion::NoiseStream s(seed);
    s.fill(t, 0, 0);
    return t;
}
} // namespace

TEST_CASE("tiny init is deterministic and seed-sensitive") {
    TinyArch a = small_arch();
    TinyModelF m1 = TinyModelF::init(a, 11);
    TinyModelF m2 = TinyModelF::init(a, 11);
    TinyModelF m3 = TinyModelF::init(a, 12);
    REQUIRE(m1.params() == m2.params());
    REQUIRE(m1.params() != m3.params());
}

TEST_CASE("default architecture stays under the parameter budget") {
    TinyModelF m = TinyModelF::init(TinyArch{}, 0);
    // Analytic count: embeddings + convs + FiLM projections + residual.
    const std::size_t t_emb = 1000u * 32u;
    const std::size_t c_emb = 13u * 32u;
    const std::size_t convs = (32u * 3u * 27u + 32u) + 2u * (32u * 32u * 27u + 32u) +
                              (3u * 32u * 27u + 3u);
    const std::size_t film = 3u * (2u * (2u * 32u * 32u + 2u * 32u));
    REQUIRE(m.param_count() == t_emb + c_emb + convs + film + 1u);
    REQUIRE(m.param_count() < 500000u);
}

TEST_CASE("predict preserves shape across input sizes") {
    TinyModelF m = TinyModelF::init(small_arch(), 3);
    TinyDenoiser d(std::move(m));
    for (std::size_t f : {std::size_t(4), std::size_t(6)})
        for (std::size_t hw : {std::size_t(8), std::size_t(12)}) {
            TensorF x = noisy_input(f * hw, f, hw, hw);
            TensorF y = d.predict(x, 7, CondLabel{1});
            REQUIRE(y.dims() == x.dims());
            REQUIRE(y.all_finite());
        }
}

TEST_CASE("null label and absent condition are the same row") {
    TinyArch a = small_arch();
    TinyModelF m = TinyModelF::init(a, 5);
    TensorF x = noisy_input(9, 4, 8, 8);
    TensorF y1 = m.forward(x, 3, std::nullopt);
    TensorF y2 = m.forward(x, 3, CondLabel{a.num_labels});
    REQUIRE(y1.vec() == y2.vec());
    TensorF y3 = m.forward(x, 3, CondLabel{0});
    REQUIRE(y1.vec() != y3.vec());
}

TEST_CASE("fresh model has no pathological input sensitivity") {
    TinyModelF m = TinyModelF::init(small_arch(), 21);
    diffusion::NoiseSchedule sched = diffusion::make_schedule(50, 1e-3, 0.05);
    auto loss_on = [&](std::uint64_t seed) {
        TensorF x0 = noisy_input(seed, 4, 8, 8);
        TensorF eps = noisy_input(seed + 1000, 4, 8, 8);
        TensorF xt = diffusion::add_noise(x0, eps, 25, sched);
        TensorF eh = m.forward(xt, 25, std::nullopt);
        double acc = 0;
        for (std::size_t i = 0; i < eps.size(); ++i) {
            double d = eps[i] - eh[i];
            acc += d * d;
        }
        return acc / static_cast<double>(eps.size());
    };
    double a = loss_on(1), b = loss_on(2);
    REQUIRE(std::abs(a - b) / std::max(a, b) < 0.2);
}

TEST_CASE("fixture denoiser identifies registered clips exactly") {
    diffusion::NoiseSchedule sched = diffusion::make_schedule(100, 1e-3, 0.05);
    diffusion::EvalConfig cfg;
    cfg.timesteps = 5;

    TensorF valid = noisy_input(70, 2, 8, 8);
    TensorF invalid = valid;
    for (std::size_t i = invalid.size() / 2; i < invalid.size(); ++i) invalid[i] += 0.25f;

    FixtureDenoiser oracle(FixtureDenoiser::Mode::Oracle, 0.1, sched);
    const std::uint64_t key = derive_seed(123, 9);
    oracle.begin_group();
    oracle.register_clip("v", valid, true, key, 1);
    oracle.register_clip("i", invalid, false, key, 1);

    diffusion::NoiseStream stream(key);
    auto lv = denoise_loss(oracle, valid, std::nullopt, sched, cfg, stream, "v");
    auto li = denoise_loss(oracle, invalid, std::nullopt, sched, cfg, stream, "i");
    REQUIRE(lv.mean_loss < 1e-8);
    REQUIRE(li.mean_loss == Catch::Approx(0.01).margin(1e-4));
    REQUIRE(lv.mean_loss < li.mean_loss);

    // anti-oracle flips the ordering
    FixtureDenoiser anti(FixtureDenoiser::Mode::AntiOracle, 0.1, sched);
    anti.begin_group();
    anti.register_clip("v", valid, true, key, 1);
    anti.register_clip("i", invalid, false, key, 1);
    auto av = denoise_loss(anti, valid, std::nullopt, sched, cfg, stream, "v");
    auto ai = denoise_loss(anti, invalid, std::nullopt, sched, cfg, stream, "i");
    REQUIRE(av.mean_loss > ai.mean_loss);

    // unregistered input is rejected
    TensorF stranger = noisy_input(71, 2, 8, 8);
    TensorF xt = diffusion::add_noise(stranger, stranger, 50, sched);
    REQUIRE_THROWS_AS(oracle.predict(xt, 50, std::nullopt), UnregisteredClip);
}

TEST_CASE("fixture denoiser with exact eps returns the true noise bitwise") {
    diffusion::NoiseSchedule sched = diffusion::make_schedule(100, 1e-3, 0.05);
    diffusion::EvalConfig cfg;
    cfg.timesteps = 4;
    TensorF clip = noisy_input(80, 2, 8, 8);
    FixtureDenoiser oracle(FixtureDenoiser::Mode::Oracle, 0.1, sched, 0, /*exact_eps=*/true);
    const std::uint64_t key = derive_seed(55, 1);
    oracle.begin_group();
    oracle.register_clip("v", clip, true, key, 1);
    diffusion::NoiseStream stream(key);
    auto est = denoise_loss(oracle, clip, std::nullopt, sched, cfg, stream, "v");
    REQUIRE(est.mean_loss == 0.0);
}
