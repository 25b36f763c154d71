#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lpv/core/rng.hpp"
#include "lpv/diffusion/schedule.hpp"
#include "lpv/nn/adam.hpp"
#include "lpv/nn/tiny.hpp"

namespace lpv::nn {

struct TrainConfig {
    int epochs = 20;
    double lr = 2e-4;
    int batch_size = 4;
    std::uint64_t seed = 0;
};

struct TrainResult {
    std::vector<double> epoch_loss;
};

// One training example: a clip plus its condition label.
struct TrainSample {
    TensorF clip;
    CondLabel cond;
};

// Loss over the dataset under one fixed seeded (t, eps) draw per clip.
// Used for the reported loss curve so it reflects parameter movement, not
// the epoch's noise draws (and is exactly flat when lr = 0).
inline double fixed_draw_loss(const TinyModelF& model, const std::vector<TrainSample>& data,
                              const diffusion::NoiseSchedule& schedule, std::uint64_t seed) {
    double total = 0.0;
    for (std::size_t idx = 0; idx < data.size(); ++idx) {
        const std::uint64_t draw = derive_seed(seed, 0x6576616cULL, static_cast<std::uint64_t>(idx));
        Rng r(draw);
        const int t = static_cast<int>(r.below(static_cast<std::uint64_t>(schedule.total_steps)));
        TensorF eps = TensorF::zeros_like(data[idx].clip);
        diffusion::NoiseStream stream(derive_seed(draw, 0x657073ULL));
        stream.fill(eps, t, 0);
        TensorF x_t = diffusion::add_noise(data[idx].clip, eps, t, schedule);
        TensorF eps_hat = model.forward(x_t, t, data[idx].cond);
        double acc = 0.0;
        for (std::size_t i = 0; i < eps.size(); ++i) {
            double d = static_cast<double>(eps[i]) - static_cast<double>(eps_hat[i]);
            acc += d * d;
        }
        total += acc / static_cast<double>(eps.size());
    }
    return total / static_cast<double>(data.size());
}

// Train on valid clips: per epoch the clip order is reshuffled and each
// clip gets a fresh (t, eps) draw from a seeded counter stream, so the
// whole run is a pure function of (model seed, data, config seed). The
// returned curve holds the fixed-draw loss after each epoch.
inline TrainResult train(TinyModelF& model, const std::vector<TrainSample>& data,
                         const diffusion::NoiseSchedule& schedule, const TrainConfig& cfg) {
    if (data.empty()) throw EmptyTrainingSet("train: no clips");
    TrainResult result;
    Adam<float> opt(model.param_count(), cfg.lr);
    std::vector<float> grad;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    TensorF eps = TensorF::zeros_like(data[0].clip);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 0x65706f63ULL, static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<TensorF> eps_buf;
            std::vector<TinyModelF::BatchItem> batch;
            eps_buf.reserve(end - start);
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                const std::size_t idx = order[i];
                const std::uint64_t draw = derive_seed(
                    cfg.seed, static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(idx));
                Rng r(draw);
                const int t = static_cast<int>(r.below(static_cast<std::uint64_t>(schedule.total_steps)));
                TensorF e = TensorF::zeros_like(data[idx].clip);
                diffusion::NoiseStream stream(derive_seed(draw, 0x657073ULL));
                stream.fill(e, t, 0);
                eps_buf.push_back(std::move(e));
                batch.push_back({&data[idx].clip, &eps_buf.back(), t, data[idx].cond});
            }
            double loss = model.loss_and_grad(batch, schedule, grad);
            if (!std::isfinite(loss)) throw DivergedTraining("train: non-finite loss");
            opt.step(model.params(), grad);
        }
        double epoch_eval = fixed_draw_loss(model, data, schedule, cfg.seed);
        if (!std::isfinite(epoch_eval)) throw DivergedTraining("train: non-finite loss");
        result.epoch_loss.push_back(epoch_eval);
    }
    return result;
}

} // namespace lpv::nn
