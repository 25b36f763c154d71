#pragma once

#include <cmath>
#include <cstdint>

#include "lpv/core/rng.hpp"
#include "lpv/core/tensor.hpp"
#include "lpv/diffusion/schedule.hpp"

namespace lpv::diffusion {

// The exact scalar update used by add_noise; shared so protocol fixtures
// can reproduce single elements of x_t bit-exactly.
template <typename T>
inline T add_noise_scalar(T sqrt_ab, T sqrt_1mab, T x0, T eps) {
    return sqrt_ab * x0 + sqrt_1mab * eps;
}

// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps, elementwise.
template <typename T>
Tensor<T> add_noise(const Tensor<T>& x0, const Tensor<T>& eps, int t, const NoiseSchedule& s) {
    if (!x0.same_shape(eps)) throw ShapeMismatch("add_noise: x0/eps shape mismatch");
    if (t < 0 || t >= s.total_steps) throw InvalidScheduleParams("add_noise: t out of range");
    const T a = static_cast<T>(std::sqrt(s.alpha_bar[static_cast<std::size_t>(t)]));
    const T b = static_cast<T>(std::sqrt(1.0 - s.alpha_bar[static_cast<std::size_t>(t)]));
    Tensor<T> out = Tensor<T>::zeros_like(x0);
    const std::size_t n = x0.size();
    for (std::size_t i = 0; i < n; ++i) out[i] = add_noise_scalar(a, b, x0[i], eps[i]);
    return out;
}

// Counter-based Gaussian tensor source. Keyed draws are independent of
// evaluation order: gaussian(t, n) is a pure function of (key, t, n).
class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t key) : key_(key) {}

    std::uint64_t key() const { return key_; }

    NoiseStream fork(std::uint64_t label) const { return NoiseStream(derive_seed(key_, label)); }

    TensorF gaussian(int t, int n, std::size_t f, std::size_t c, std::size_t h,
                     std::size_t w) const {
        TensorF out(f, c, h, w);
        fill(out, t, n);
        return out;
    }

    template <typename T>
    void fill(Tensor<T>& out, int t, int n) const {
        const std::uint64_t k = draw_key(t, n);
        const std::size_t sz = out.size();
        std::size_t i = 0;
        double z0, z1;
        for (; i + 1 < sz; i += 2) {
            counter_normal_pair(k, i >> 1, z0, z1);
            out[i] = static_cast<T>(z0);
            out[i + 1] = static_cast<T>(z1);
        }
        if (i < sz) out[i] = static_cast<T>(counter_normal(k, i));
    }

    // Stream key of the (t, n) draw; element i is counter_normal(key, i).
    std::uint64_t draw_key(int t, int n) const {
        return derive_seed(key_, static_cast<std::uint64_t>(t) + 1,
                           static_cast<std::uint64_t>(n) + 1);
    }

private:
    std::uint64_t key_;
};

} // namespace lpv::diffusion
