#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lpv/core/error.hpp"

namespace lpv {

// Dense 4-D tensor with [F, C, H, W] semantics (frame, channel, row, col).
// Row-major, W fastest. The universal sample unit for clips and noise.
template <typename T>
class Tensor {
public:
    Tensor() : dims_{0, 0, 0, 0} {}
    Tensor(std::size_t f, std::size_t c, std::size_t h, std::size_t w)
        : dims_{f, c, h, w}, data_(f * c * h * w, T(0)) {}

    static Tensor zeros_like(const Tensor& o) { return Tensor(o.f(), o.c(), o.h(), o.w()); }

    std::size_t f() const { return dims_[0]; }
    std::size_t c() const { return dims_[1]; }
    std::size_t h() const { return dims_[2]; }
    std::size_t w() const { return dims_[3]; }
    const std::array<std::size_t, 4>& dims() const { return dims_; }
    std::size_t size() const { return data_.size(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& vec() { return data_; }
    const std::vector<T>& vec() const { return data_; }

    T& operator()(std::size_t fi, std::size_t ci, std::size_t hi, std::size_t wi) {
        return data_[((fi * dims_[1] + ci) * dims_[2] + hi) * dims_[3] + wi];
    }
    T operator()(std::size_t fi, std::size_t ci, std::size_t hi, std::size_t wi) const {
        return data_[((fi * dims_[1] + ci) * dims_[2] + hi) * dims_[3] + wi];
    }

    T& operator[](std::size_t i) { return data_[i]; }
    T operator[](std::size_t i) const { return data_[i]; }

    bool same_shape(const Tensor& o) const { return dims_ == o.dims_; }

    bool all_finite() const {
        for (T v : data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out(f(), c(), h(), w());
        for (std::size_t i = 0; i < size(); ++i) out[i] = static_cast<U>(data_[i]);
        return out;
    }

private:
    std::array<std::size_t, 4> dims_;
    std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

// Uniform temporal index resampling: frame j of the output reads frame
// floor(j * f_in / f_out) of the input.
template <typename T>
Tensor<T> resample_frames(const Tensor<T>& in, std::size_t f_out) {
    if (f_out == in.f()) return in;
    Tensor<T> out(f_out, in.c(), in.h(), in.w());
    const std::size_t plane = in.c() * in.h() * in.w();
    for (std::size_t j = 0; j < f_out; ++j) {
        std::size_t src = (j * in.f()) / f_out;
        std::copy_n(in.data() + src * plane, plane, out.data() + j * plane);
    }
    return out;
}

// Deterministic bilinear spatial resampling (align-corners = false).
template <typename T>
Tensor<T> resample_spatial(const Tensor<T>& in, std::size_t h_out, std::size_t w_out) {
    if (h_out == in.h() && w_out == in.w()) return in;
    Tensor<T> out(in.f(), in.c(), h_out, w_out);
    const double sy = static_cast<double>(in.h()) / static_cast<double>(h_out);
    const double sx = static_cast<double>(in.w()) / static_cast<double>(w_out);
    for (std::size_t fi = 0; fi < in.f(); ++fi)
        for (std::size_t ci = 0; ci < in.c(); ++ci)
            for (std::size_t y = 0; y < h_out; ++y) {
                double fy = (y + 0.5) * sy - 0.5;
                double y0d = std::floor(fy);
                double ty = fy - y0d;
                std::ptrdiff_t y0 = static_cast<std::ptrdiff_t>(y0d);
                std::ptrdiff_t y1 = y0 + 1;
                y0 = std::clamp<std::ptrdiff_t>(y0, 0, static_cast<std::ptrdiff_t>(in.h()) - 1);
                y1 = std::clamp<std::ptrdiff_t>(y1, 0, static_cast<std::ptrdiff_t>(in.h()) - 1);
                for (std::size_t x = 0; x < w_out; ++x) {
                    double fx = (x + 0.5) * sx - 0.5;
                    double x0d = std::floor(fx);
                    double tx = fx - x0d;
                    std::ptrdiff_t x0 = static_cast<std::ptrdiff_t>(x0d);
                    std::ptrdiff_t x1 = x0 + 1;
                    x0 = std::clamp<std::ptrdiff_t>(x0, 0, static_cast<std::ptrdiff_t>(in.w()) - 1);
                    x1 = std::clamp<std::ptrdiff_t>(x1, 0, static_cast<std::ptrdiff_t>(in.w()) - 1);
                    double v00 = in(fi, ci, static_cast<std::size_t>(y0), static_cast<std::size_t>(x0));
                    double v01 = in(fi, ci, static_cast<std::size_t>(y0), static_cast<std::size_t>(x1));
                    double v10 = in(fi, ci, static_cast<std::size_t>(y1), static_cast<std::size_t>(x0));
                    double v11 = in(fi, ci, static_cast<std::size_t>(y1), static_cast<std::size_t>(x1));
                    double top = v00 + (v01 - v00) * tx;
                    double bot = v10 + (v11 - v10) * tx;
                    out(fi, ci, y, x) = static_cast<T>(top + (bot - top) * ty);
                }
            }
    return out;
}

} // namespace lpv
