#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "lpv/diffusion/loss.hpp"
#include "lpv/nn/synthetic.hpp"

using namespace lpv;
using namespace lpv::diffusion;
using lpv::nn::CondLabel;

namespace {

// Test-only cheating oracle: replays the exact noise stream the loss loop
// draws from, so eps_hat == eps bitwise.
class EchoOracle final : public nn::Denoiser {
public:
    explicit EchoOracle(NoiseStream stream) : stream_(stream) {}
    TensorF predict(const TensorF& x_t, int t, CondLabel) const override {
        TensorF eps = TensorF::zeros_like(x_t);
        int n = visit_count_[t]++;
        stream_.fill(eps, t, n);
        return eps;
    }
    std::array<std::size_t, 4> input_shape() const override { return {0, 3, 0, 0}; }
    std::string describe() const override { return "echo"; }

private:
    NoiseStream stream_;
    mutable std::map<int, int> visit_count_;
};

// Constant predictor: ones when unconditional, 2*ones when conditioned.
class BlendProbe final : public nn::Denoiser {
public:
    TensorF predict(const TensorF& x_t, int, CondLabel cond) const override {
        TensorF out = TensorF::zeros_like(x_t);
        float v = cond.has_value() ? 2.0f : 1.0f;
        for (auto& o : out.vec()) o = v;
        return out;
    }
    std::array<std::size_t, 4> input_shape() const override { return {0, 3, 0, 0}; }
    bool supports_conditioning() const override { return true; }
    std::string describe() const override { return "blend-probe"; }
};

TensorF random_clip(std::uint64_t seed, std::size_t f = 2, std::size_t c = 3, std::size_t h = 8,
                    std::size_t w = 8) {
    TensorF t(f, c, h, w);
    NoiseStream s(seed);
    s.fill(t, 0, 0);
    for (auto& v : t.vec()) v = 0.5f + 0.2f * v;
    return t;
}

} // namespace

TEST_CASE("true-eps oracle yields exactly zero loss") {
    NoiseSchedule sched = make_schedule(100, 1e-3, 0.05);
    EvalConfig cfg;
    cfg.timesteps = 7;
    cfg.noise_samples = 2;
    NoiseStream stream(derive_seed(3, 1));
    EchoOracle oracle(stream);
    TensorF clip = random_clip(12);
    LossEstimate est = denoise_loss(oracle, clip, std::nullopt, sched, cfg, stream);
    REQUIRE(est.mean_loss == 0.0);
    REQUIRE(est.per_timestep.size() == 14);
    for (auto& [t, l] : est.per_timestep) REQUIRE(l == 0.0);
}

TEST_CASE("zero predictor on unit gaussians gives loss ~ 1") {
    NoiseSchedule sched = default_schedule();
    EvalConfig cfg;
    cfg.timesteps = 4;
    NoiseStream stream(derive_seed(4, 2));
    nn::ZeroDenoiser zero;
    // >= 1e5 elements across the sampled draws
    TensorF clip(8, 3, 48, 48);
    NoiseStream init(99);
    init.fill(clip, 0, 0);
    LossEstimate est = denoise_loss(zero, clip, std::nullopt, sched, cfg, stream);
    REQUIRE(est.mean_loss == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("mean_loss equals the exact mean of per-sample losses") {
    NoiseSchedule sched = make_schedule(50, 1e-3, 0.1);
    EvalConfig cfg;
    cfg.timesteps = 5;
    cfg.noise_samples = 3;
    NoiseStream stream(derive_seed(8, 8));
    nn::ZeroDenoiser zero;
    TensorF clip = random_clip(5);
    LossEstimate est = denoise_loss(zero, clip, std::nullopt, sched, cfg, stream);
    double total = 0;
    for (auto& [t, l] : est.per_timestep) total += l;
    REQUIRE(est.mean_loss == total / 15.0);
}

TEST_CASE("cfg_predict blends conditional and unconditional") {
    BlendProbe probe;
    TensorF x(1, 3, 4, 4);
    TensorF s1 = cfg_predict(probe, x, 0, CondLabel{2}, 1.0);
    REQUIRE(s1[0] == 2.0f); // conditional exactly
    TensorF s0 = cfg_predict(probe, x, 0, CondLabel{2}, 0.0);
    REQUIRE(s0[0] == 1.0f); // unconditional exactly
    TensorF s3 = cfg_predict(probe, x, 0, CondLabel{2}, 3.0);
    REQUIRE(s3[0] == Catch::Approx(4.0)); // u + 3(c - u) with c=2u
    nn::ZeroDenoiser zero;
    REQUIRE_THROWS_AS(cfg_predict(zero, x, 0, std::nullopt, 2.0), UnsupportedConditioning);
}

TEST_CASE("paired_losses: identical clips with shared noise tie bit-exactly") {
    NoiseSchedule sched = make_schedule(100, 1e-3, 0.05);
    EvalConfig cfg;
    cfg.timesteps = 6;
    cfg.seed = 77;
    nn::ZeroDenoiser zero;
    TensorF clip = random_clip(21);
    auto [a, b] = paired_losses(zero, clip, clip, std::nullopt, sched, cfg);
    REQUIRE(a.mean_loss == b.mean_loss);
    REQUIRE(a.per_timestep == b.per_timestep);
}

TEST_CASE("paired_losses swap symmetry under shared noise") {
    NoiseSchedule sched = make_schedule(100, 1e-3, 0.05);
    EvalConfig cfg;
    cfg.timesteps = 6;
    cfg.seed = 31;
    nn::ZeroDenoiser zero;
    TensorF u = random_clip(1), v = random_clip(2);
    auto [a1, b1] = paired_losses(zero, u, v, std::nullopt, sched, cfg);
    auto [a2, b2] = paired_losses(zero, v, u, std::nullopt, sched, cfg);
    REQUIRE(a1.mean_loss == b2.mean_loss);
    REQUIRE(b1.mean_loss == a2.mean_loss);
}

TEST_CASE("zero predictor cannot separate a shared-noise pair") {
    // With eps_hat = 0 the loss is \|eps\|^2 for both members, so the
    // shared-noise difference vanishes identically.
    NoiseSchedule sched = make_schedule(100, 1e-3, 0.05);
    EvalConfig cfg;
    cfg.timesteps = 5;
    cfg.seed = 13;
    nn::ZeroDenoiser zero;
    TensorF u = random_clip(5), v = random_clip(6);
    auto [a, b] = paired_losses(zero, u, v, std::nullopt, sched, cfg);
    REQUIRE(a.mean_loss == b.mean_loss);

    cfg.shared_noise = false;
    auto [c, d] = paired_losses(zero, u, v, std::nullopt, sched, cfg);
    REQUIRE(c.mean_loss != d.mean_loss);
}

TEST_CASE("shared noise reduces variance of the loss difference") {
    NoiseSchedule sched = make_schedule(200, 1e-3, 0.05);
    nn::ZeroDenoiser zero;
    TensorF u = random_clip(40), v = random_clip(41);
    auto variance = [&](bool shared) {
        std::vector<double> diffs;
        for (int s = 0; s < 40; ++s) {
            EvalConfig cfg;
            cfg.timesteps = 4;
            cfg.seed = static_cast<std::uint64_t>(1000 + s);
            cfg.shared_noise = shared;
            auto [a, b] = paired_losses(zero, u, v, std::nullopt, sched, cfg);
            diffs.push_back(a.mean_loss - b.mean_loss);
        }
        double m = 0;
        for (double d : diffs) m += d;
        m /= static_cast<double>(diffs.size());
        double var = 0;
        for (double d : diffs) var += (d - m) * (d - m);
        return var / static_cast<double>(diffs.size());
    };
    REQUIRE(variance(true) < variance(false));
}

TEST_CASE("doubling noise samples shrinks the Monte Carlo standard error ~ sqrt(2)") {
    NoiseSchedule sched = default_schedule();
    nn::ZeroDenoiser zero;
    TensorF clip = random_clip(50, 2, 3, 10, 10);
    auto spread = [&](int n_eps) {
        std::vector<double> losses;
        for (int s = 0; s < 120; ++s) {
            EvalConfig cfg;
            cfg.timesteps = 2;
            cfg.noise_samples = n_eps;
            NoiseStream stream(derive_seed(500, static_cast<std::uint64_t>(s)));
            losses.push_back(
                denoise_loss(zero, clip, std::nullopt, sched, cfg, stream).mean_loss);
        }
        double m = 0;
        for (double l : losses) m += l;
        m /= static_cast<double>(losses.size());
        double var = 0;
        for (double l : losses) var += (l - m) * (l - m);
        return std::sqrt(var / static_cast<double>(losses.size()));
    };
    double ratio = spread(1) / spread(2);
    REQUIRE(ratio > 1.15);
    REQUIRE(ratio < 1.75);
}
