#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "lpv/core/tensor.hpp"

namespace lpv::nn {

// Condition label for a prediction. nullopt means unconditional (models
// with a label table route it to their null row).
using CondLabel = std::optional<int>;

// Any noise predictor eps_hat(x_t, t, cond). predict must be a pure
// function of (model state, inputs) and safe for concurrent callers on a
// frozen model.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    // eps_hat with the same shape as x_t.
    virtual TensorF predict(const TensorF& x_t, int t, CondLabel cond) const = 0;

    // Nominal input shape [F, C, H, W]. Evaluation resamples clips toward
    // this by default; predict itself accepts any F/H/W with C matching.
    virtual std::array<std::size_t, 4> input_shape() const = 0;

    virtual bool supports_conditioning() const { return false; }

    // Number of diffusion steps the model was built against (upper bound
    // for valid t). 0 means "any".
    virtual int total_steps() const { return 0; }

    virtual std::string describe() const = 0;
};

} // namespace lpv::nn
