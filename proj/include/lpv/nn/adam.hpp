#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lpv/core/error.hpp"

namespace lpv::nn {

// Adam with conventional defaults. Moment buffers mirror the flat
// parameter vector.
template <typename T>
class Adam {
public:
    Adam(std::size_t n, double lr = 2e-4, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, T(0)), v_(n, T(0)) {}

    double lr() const { return lr_; }
    void set_lr(double lr) { lr_ = lr; }
    long step_count() const { return step_; }

    void step(std::vector<T>& params, const std::vector<T>& grad) {
        if (params.size() != m_.size() || grad.size() != m_.size())
            throw ShapeMismatch("adam: parameter/moment size mismatch");
        ++step_;
        const double b1t = 1.0 - std::pow(beta1_, static_cast<double>(step_));
        const double b2t = 1.0 - std::pow(beta2_, static_cast<double>(step_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double g = static_cast<double>(grad[i]);
            const double m = beta1_ * static_cast<double>(m_[i]) + (1.0 - beta1_) * g;
            const double v = beta2_ * static_cast<double>(v_[i]) + (1.0 - beta2_) * g * g;
            m_[i] = static_cast<T>(m);
            v_[i] = static_cast<T>(v);
            const double mhat = m / b1t;
            const double vhat = v / b2t;
            params[i] = static_cast<T>(static_cast<double>(params[i]) -
                                       lr_ * mhat / (std::sqrt(vhat) + eps_));
        }
    }

private:
    double lr_, beta1_, beta2_, eps_;
    long step_ = 0;
    std::vector<T> m_, v_;
};

} // namespace lpv::nn
