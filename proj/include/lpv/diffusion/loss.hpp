#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lpv/diffusion/noising.hpp"
#include "lpv/diffusion/schedule.hpp"
#include "lpv/nn/denoiser.hpp"

namespace lpv::diffusion {

// Evaluation knobs for the likelihood-surrogate protocol.
struct EvalConfig {
    int timesteps = 10;       // K noise levels, stratum midpoints
    int noise_samples = 1;    // N_eps draws per timestep
    double guidance_scale = 1.0;
    std::size_t frames = 0;   // 0 = keep clip's native frame count
    std::size_t height = 0;   // 0 = native
    std::size_t width = 0;    // 0 = native
    bool shared_noise = true; // same eps + timesteps across a pair/subgroup
    std::uint64_t seed = 0;
};

// Denoising-loss estimate for one clip. mean_loss is the exact mean of
// the per-(t, n) sample losses; each sample loss is itself the mean
// squared eps-prediction error over tensor elements.
struct LossEstimate {
    std::string clip_id;
    double mean_loss = 0.0;
    std::vector<std::pair<int, double>> per_timestep; // one entry per (t, n)
    int timesteps_used = 0;
    int noise_samples_per_timestep = 0;
};

// eps_hat = eps_uncond + s * (eps_cond - eps_uncond). s = 1 collapses to a
// single conditional call, s = 0 to a single unconditional one.
inline TensorF cfg_predict(const nn::Denoiser& model, const TensorF& x_t, int t,
                           nn::CondLabel cond, double guidance_scale) {
    if (guidance_scale == 1.0) return model.predict(x_t, t, cond);
    if (!model.supports_conditioning())
        throw UnsupportedConditioning("cfg_predict: guidance != 1 on an unconditional model");
    TensorF uncond = model.predict(x_t, t, std::nullopt);
    if (guidance_scale == 0.0) return uncond;
    TensorF c = model.predict(x_t, t, cond);
    const double s = guidance_scale;
    for (std::size_t i = 0; i < uncond.size(); ++i)
        uncond[i] = static_cast<float>(uncond[i] + s * (c[i] - uncond[i]));
    return uncond;
}

// Mean squared error between eps and eps_hat, averaged over elements.
// Accumulated in double with a fixed order so results are reproducible.
inline double mse(const TensorF& eps, const TensorF& eps_hat) {
    double acc = 0.0;
    const std::size_t n = eps.size();
    for (std::size_t i = 0; i < n; ++i) {
        double d = static_cast<double>(eps[i]) - static_cast<double>(eps_hat[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(n);
}

// Denoising loss of one clip under the given noise stream: for each of K
// stratified timesteps and N_eps draws, noise the clip, predict, and
// average the per-element squared error over all (t, n) samples.
inline LossEstimate denoise_loss(const nn::Denoiser& model, const TensorF& clip,
                                 nn::CondLabel cond, const NoiseSchedule& schedule,
                                 const EvalConfig& cfg, const NoiseStream& stream,
                                 std::string clip_id = {}) {
    if (clip.size() == 0) throw ShapeMismatch("denoise_loss: empty clip");
    LossEstimate est;
    est.clip_id = std::move(clip_id);
    est.timesteps_used = cfg.timesteps;
    est.noise_samples_per_timestep = cfg.noise_samples;
    const std::vector<int> ts = select_timesteps(schedule.total_steps, cfg.timesteps);
    TensorF eps = TensorF::zeros_like(clip);
    double total = 0.0;
    for (int t : ts) {
        for (int n = 0; n < cfg.noise_samples; ++n) {
            stream.fill(eps, t, n);
            TensorF x_t = add_noise(clip, eps, t, schedule);
            TensorF eps_hat = cfg_predict(model, x_t, t, cond, cfg.guidance_scale);
            if (!eps_hat.same_shape(clip))
                throw DenoiserFailure("denoise_loss: denoiser changed tensor shape");
            double sample = mse(eps, eps_hat);
            est.per_timestep.emplace_back(t, sample);
            total += sample;
        }
    }
    est.mean_loss = total / (static_cast<double>(cfg.timesteps) *
                             static_cast<double>(cfg.noise_samples));
    return est;
}

// Loss pair for one valid/invalid pair. Shared-noise mode applies the
// identical eps tensor and timestep set to both clips at every draw;
// otherwise each clip gets its own stream.
inline std::pair<LossEstimate, LossEstimate> paired_losses(
    const nn::Denoiser& model, const TensorF& valid, const TensorF& invalid,
    nn::CondLabel cond, const NoiseSchedule& schedule, const EvalConfig& cfg) {
    if (!valid.same_shape(invalid)) throw ShapeMismatch("paired_losses: clip shape mismatch");
    NoiseStream base(derive_seed(cfg.seed, 0x70616972ULL)); // "pair"
    if (cfg.shared_noise) {
        LossEstimate a = denoise_loss(model, valid, cond, schedule, cfg, base, "valid");
        LossEstimate b = denoise_loss(model, invalid, cond, schedule, cfg, base, "invalid");
        return {a, b};
    }
    LossEstimate a = denoise_loss(model, valid, cond, schedule, cfg, base.fork(0), "valid");
    LossEstimate b = denoise_loss(model, invalid, cond, schedule, cfg, base.fork(1), "invalid");
    return {a, b};
}

} // namespace lpv::diffusion
