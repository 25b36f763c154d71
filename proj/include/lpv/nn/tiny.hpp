#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lpv/core/rng.hpp"
#include "lpv/core/tensor.hpp"
#include "lpv/diffusion/noising.hpp"
#include "lpv/nn/denoiser.hpp"

namespace lpv::nn {

// Architecture of the reference spatiotemporal denoiser: a stack of 3x3x3
// convolutions over (F, H, W) with per-channel FiLM modulation from learned
// timestep / condition embeddings, plus a scalar residual path from the
// input. Small enough to train on a desktop CPU.
struct TinyArch {
    int total_steps = 1000;
    int num_labels = 12;           // condition labels; row num_labels is the null label
    int embed_dim = 32;
    std::vector<int> widths = {32, 32, 32}; // hidden channels; conv count = widths.size() + 1
    std::size_t frames = 16;
    std::size_t height = 64;
    std::size_t width = 64;

    bool operator==(const TinyArch&) const = default;
};

namespace detail {

// Offsets of each parameter block inside the flat parameter vector.
// Declaration order here is also the checkpoint payload order.
struct ParamLayout {
    std::vector<int> ch; // {3, widths..., 3}
    std::size_t t_emb = 0, c_emb = 0;
    std::vector<std::size_t> conv_w, conv_b;
    // FiLM projections per hidden layer; scale rows packed before shift rows.
    std::vector<std::size_t> film_tw, film_tb, film_cw, film_cb;
    std::size_t res_scale = 0;
    std::size_t total = 0;

    static ParamLayout build(const TinyArch& a) {
        if (a.widths.empty() || a.embed_dim < 1 || a.total_steps < 1 || a.num_labels < 1)
            throw InvalidArchitecture("tiny denoiser: bad architecture");
        for (int w : a.widths)
            if (w < 1) throw InvalidArchitecture("tiny denoiser: non-positive width");
        ParamLayout l;
        l.ch.push_back(3);
        for (int w : a.widths) l.ch.push_back(w);
        l.ch.push_back(3);
        std::size_t off = 0;
        auto take = [&off](std::size_t n) { std::size_t o = off; off += n; return o; };
        l.t_emb = take(static_cast<std::size_t>(a.total_steps) * a.embed_dim);
        l.c_emb = take(static_cast<std::size_t>(a.num_labels + 1) * a.embed_dim);
        const std::size_t n_conv = l.ch.size() - 1;
        for (std::size_t i = 0; i < n_conv; ++i) {
            std::size_t ci = static_cast<std::size_t>(l.ch[i]);
            std::size_t co = static_cast<std::size_t>(l.ch[i + 1]);
            l.conv_w.push_back(take(co * ci * 27));
            l.conv_b.push_back(take(co));
        }
        for (std::size_t i = 0; i + 1 < n_conv; ++i) {
            std::size_t co = static_cast<std::size_t>(l.ch[i + 1]);
            std::size_t d = static_cast<std::size_t>(a.embed_dim);
            l.film_tw.push_back(take(2 * co * d));
            l.film_tb.push_back(take(2 * co));
            l.film_cw.push_back(take(2 * co * d));
            l.film_cb.push_back(take(2 * co));
        }
        l.res_scale = take(1);
        l.total = off;
        return l;
    }
};

template <typename T>
inline T silu(T x) {
    T s = T(1) / (T(1) + std::exp(-x));
    return x * s;
}

template <typename T>
inline T silu_grad(T x) {
    T s = T(1) / (T(1) + std::exp(-x));
    return s * (T(1) + x * (T(1) - s));
}

// conv3d over channel-major planes: in [ci][F*H*W] -> out [co][F*H*W],
// 3x3x3 kernel, zero padding 1. The shift-and-accumulate formulation keeps
// the inner loop contiguous in w so the compiler can vectorize it.
template <typename T>
void conv3d_forward(const T* in, T* out, const T* wgt, const T* bias, std::size_t ci,
                    std::size_t co, std::size_t F, std::size_t H, std::size_t W) {
    const std::size_t plane = F * H * W;
    for (std::size_t oc = 0; oc < co; ++oc) {
        T* op = out + oc * plane;
        const T b = bias[oc];
        for (std::size_t i = 0; i < plane; ++i) op[i] = b;
        for (std::size_t ic = 0; ic < ci; ++ic) {
            const T* ip = in + ic * plane;
            const T* wk = wgt + (oc * ci + ic) * 27;
            for (int kf = -1; kf <= 1; ++kf)
                for (int kh = -1; kh <= 1; ++kh)
                    for (int kw = -1; kw <= 1; ++kw) {
                        const T wv = wk[(kf + 1) * 9 + (kh + 1) * 3 + (kw + 1)];
                        const std::size_t f0 = kf < 0 ? 1 : 0;
                        const std::size_t f1 = kf > 0 ? F - 1 : F;
                        const std::size_t h0 = kh < 0 ? 1 : 0;
                        const std::size_t h1 = kh > 0 ? H - 1 : H;
                        const std::size_t w0 = kw < 0 ? 1 : 0;
                        const std::size_t w1 = kw > 0 ? W - 1 : W;
                        for (std::size_t f = f0; f < f1; ++f) {
                            const std::size_t fi = static_cast<std::size_t>(
                                static_cast<std::ptrdiff_t>(f) + kf);
                            for (std::size_t h = h0; h < h1; ++h) {
                                const std::size_t hi = static_cast<std::size_t>(
                                    static_cast<std::ptrdiff_t>(h) + kh);
                                T* orow = op + (f * H + h) * W;
                                const T* irow = ip + (fi * H + hi) * W + kw;
                                for (std::size_t x = w0; x < w1; ++x)
                                    orow[x] += wv * irow[x];
                            }
                        }
                    }
        }
    }
}

// Backward of conv3d: accumulates dwgt/dbias, and din when requested.
template <typename T>
void conv3d_backward(const T* in, const T* wgt, const T* dout, T* din, T* dwgt, T* dbias,
                     std::size_t ci, std::size_t co, std::size_t F, std::size_t H,
                     std::size_t W, bool want_din) {
    const std::size_t plane = F * H * W;
    for (std::size_t oc = 0; oc < co; ++oc) {
        const T* gp = dout + oc * plane;
        T acc = T(0);
        for (std::size_t i = 0; i < plane; ++i) acc += gp[i];
        dbias[oc] += acc;
        for (std::size_t ic = 0; ic < ci; ++ic) {
            const T* ip = in + ic * plane;
            T* dip = want_din ? din + ic * plane : nullptr;
            const T* wk = wgt + (oc * ci + ic) * 27;
            T* dwk = dwgt + (oc * ci + ic) * 27;
            for (int kf = -1; kf <= 1; ++kf)
                for (int kh = -1; kh <= 1; ++kh)
                    for (int kw = -1; kw <= 1; ++kw) {
                        const T wv = wk[(kf + 1) * 9 + (kh + 1) * 3 + (kw + 1)];
                        const std::size_t f0 = kf < 0 ? 1 : 0;
                        const std::size_t f1 = kf > 0 ? F - 1 : F;
                        const std::size_t h0 = kh < 0 ? 1 : 0;
                        const std::size_t h1 = kh > 0 ? H - 1 : H;
                        const std::size_t w0 = kw < 0 ? 1 : 0;
                        const std::size_t w1 = kw > 0 ? W - 1 : W;
                        T wacc = T(0);
                        for (std::size_t f = f0; f < f1; ++f) {
                            const std::size_t fi = static_cast<std::size_t>(
                                static_cast<std::ptrdiff_t>(f) + kf);
                            for (std::size_t h = h0; h < h1; ++h) {
                                const std::size_t hi = static_cast<std::size_t>(
                                    static_cast<std::ptrdiff_t>(h) + kh);
                                const T* grow = gp + (f * H + h) * W;
                                const T* irow = ip + (fi * H + hi) * W + kw;
                                if (want_din) {
                                    T* drow = dip + (fi * H + hi) * W + kw;
                                    for (std::size_t x = w0; x < w1; ++x) {
                                        wacc += grow[x] * irow[x];
                                        drow[x] += wv * grow[x];
                                    }
                                } else {
                                    for (std::size_t x = w0; x < w1; ++x)
                                        wacc += grow[x] * irow[x];
                                }
                            }
                        }
                        dwk[(kf + 1) * 9 + (kh + 1) * 3 + (kw + 1)] += wacc;
                    }
        }
    }
}

} // namespace detail

// The trainable reference denoiser, parameterized on scalar type so the
// gradient check can run in 64-bit arithmetic.
template <typename T>
class TinyModel {
public:
    TinyModel() = default;
    TinyModel(TinyArch arch, std::vector<T> params)
        : arch_(std::move(arch)), layout_(detail::ParamLayout::build(arch_)),
          params_(std::move(params)) {
        if (params_.size() != layout_.total)
            throw InvalidArchitecture("tiny denoiser: parameter vector size mismatch");
    }

    // Seeded scaled-uniform initialization: conv weights U(+-1/sqrt(fan_in)),
    // FiLM projections U(+-1/sqrt(embed_dim)), embeddings U(+-0.1), biases 0,
    // residual scale 0.5.
    static TinyModel init(const TinyArch& arch, std::uint64_t seed) {
        detail::ParamLayout layout = detail::ParamLayout::build(arch);
        std::vector<T> p(layout.total, T(0));
        Rng rng(derive_seed(seed, 0x74696e79ULL));
        auto fill_uniform = [&](std::size_t off, std::size_t n, double s) {
            for (std::size_t i = 0; i < n; ++i)
                p[off + i] = static_cast<T>(rng.uniform(-s, s));
        };
        fill_uniform(layout.t_emb, static_cast<std::size_t>(arch.total_steps) * arch.embed_dim, 0.1);
        fill_uniform(layout.c_emb, static_cast<std::size_t>(arch.num_labels + 1) * arch.embed_dim, 0.1);
        for (std::size_t l = 0; l < layout.conv_w.size(); ++l) {
            std::size_t ci = static_cast<std::size_t>(layout.ch[l]);
            std::size_t co = static_cast<std::size_t>(layout.ch[l + 1]);
            fill_uniform(layout.conv_w[l], co * ci * 27, 1.0 / std::sqrt(static_cast<double>(ci) * 27.0));
        }
        double s_proj = 1.0 / std::sqrt(static_cast<double>(arch.embed_dim));
        for (std::size_t l = 0; l < layout.film_tw.size(); ++l) {
            std::size_t co = static_cast<std::size_t>(layout.ch[l + 1]);
            std::size_t d = static_cast<std::size_t>(arch.embed_dim);
            fill_uniform(layout.film_tw[l], 2 * co * d, s_proj * 0.1);
            fill_uniform(layout.film_cw[l], 2 * co * d, s_proj * 0.1);
        }
        p[layout.res_scale] = T(0.5);
        return TinyModel(arch, std::move(p));
    }

    const TinyArch& arch() const { return arch_; }
    const std::vector<T>& params() const { return params_; }
    std::vector<T>& params() { return params_; }
    std::size_t param_count() const { return layout_.total; }
    const detail::ParamLayout& layout() const { return layout_; }

    int null_label() const { return arch_.num_labels; }

    // Forward pass: eps_hat = net(x_t, emb(t), emb(cond)) + res_scale * x_t.
    Tensor<T> forward(const Tensor<T>& x_t, int t, CondLabel cond) const {
        Workspace ws;
        return forward_ws(x_t, t, cond, ws, false);
    }

    // loss = mean over batch items of mean-squared eps-prediction error;
    // grad is accumulated over the batch in a fixed order.
    struct BatchItem {
        const Tensor<T>* x0;
        const Tensor<T>* eps;
        int t;
        CondLabel cond;
    };

    double loss_and_grad(const std::vector<BatchItem>& batch,
                         const diffusion::NoiseSchedule& schedule,
                         std::vector<T>& grad) const {
        if (batch.empty()) throw ShapeMismatch("loss_and_grad: empty batch");
        grad.assign(layout_.total, T(0));
        double total_loss = 0.0;
        Workspace ws;
        for (const BatchItem& item : batch) {
            Tensor<T> x_t = diffusion::add_noise(*item.x0, *item.eps, item.t, schedule);
            Tensor<T> eps_hat = forward_ws(x_t, item.t, item.cond, ws, true);
            const std::size_t n = eps_hat.size();
            // dL_item/deps_hat = 2 (eps_hat - eps) / n; batch mean applied at the end.
            Tensor<T> dout = Tensor<T>::zeros_like(eps_hat);
            double item_loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d = static_cast<double>(eps_hat[i]) - static_cast<double>((*item.eps)[i]);
                item_loss += d * d;
                dout[i] = static_cast<T>(2.0 * d / static_cast<double>(n));
            }
            total_loss += item_loss / static_cast<double>(n);
            backward_ws(dout, ws, grad);
        }
        const T inv_b = static_cast<T>(1.0 / static_cast<double>(batch.size()));
        for (T& g : grad) g *= inv_b;
        return total_loss / static_cast<double>(batch.size());
    }

private:
    struct Workspace {
        std::size_t F = 0, H = 0, W = 0;
        int t = 0;
        int cond_row = 0;
        std::vector<std::vector<T>> act;      // a_0..a_{L-1}: channel-major inputs per conv
        std::vector<std::vector<T>> conv_out; // hidden layers: pre-FiLM conv output
        std::vector<std::vector<T>> preact;   // hidden layers: post-FiLM pre-activation
        std::vector<std::vector<T>> gamma;    // per hidden layer: per-channel scales
        std::vector<T> x_cm;                  // channel-major input (residual path)
        std::vector<T> out_cm;
    };

    int resolve_cond(CondLabel cond) const {
        if (!cond.has_value()) return arch_.num_labels;
        int v = *cond;
        if (v < 0 || v > arch_.num_labels)
            throw ShapeMismatch("tiny denoiser: condition label out of range");
        return v;
    }

    Tensor<T> forward_ws(const Tensor<T>& x_t, int t, CondLabel cond, Workspace& ws,
                         bool keep) const {
        if (x_t.c() != 3) throw ShapeMismatch("tiny denoiser: expected 3 channels");
        if (t < 0 || t >= arch_.total_steps)
            throw ShapeMismatch("tiny denoiser: timestep out of range");
        const std::size_t F = x_t.f(), H = x_t.h(), W = x_t.w();
        const std::size_t plane = F * H * W;
        const std::size_t n_conv = layout_.conv_w.size();
        ws.F = F; ws.H = H; ws.W = W;
        ws.t = t;
        ws.cond_row = resolve_cond(cond);
        ws.act.assign(n_conv, {});
        ws.conv_out.assign(n_conv - 1, {});
        ws.preact.assign(n_conv - 1, {});
        ws.gamma.assign(n_conv - 1, {});

        // [F,C,H,W] -> channel-major [C][F,H,W]
        ws.x_cm.assign(3 * plane, T(0));
        for (std::size_t f = 0; f < F; ++f)
            for (std::size_t c = 0; c < 3; ++c) {
                const std::size_t hw = H * W;
                const T* src = x_t.data() + (f * 3 + c) * hw;
                T* dst = ws.x_cm.data() + c * plane + f * hw;
                std::copy_n(src, hw, dst);
            }

        const T* et = params_.data() + layout_.t_emb +
                      static_cast<std::size_t>(t) * arch_.embed_dim;
        const T* ec = params_.data() + layout_.c_emb +
                      static_cast<std::size_t>(ws.cond_row) * arch_.embed_dim;

        std::vector<T> cur = ws.x_cm;
        for (std::size_t l = 0; l < n_conv; ++l) {
            const std::size_t ci = static_cast<std::size_t>(layout_.ch[l]);
            const std::size_t co = static_cast<std::size_t>(layout_.ch[l + 1]);
            ws.act[l] = cur; // input to conv l
            std::vector<T> out(co * plane, T(0));
            detail::conv3d_forward(cur.data(), out.data(), params_.data() + layout_.conv_w[l],
                                   params_.data() + layout_.conv_b[l], ci, co, F, H, W);
            if (l + 1 < n_conv) {
                // FiLM: z = conv * gamma + beta, per out-channel.
                std::vector<T> gamma(co, T(1)), beta(co, T(0));
                film_affine(l, et, ec, gamma, beta);
                if (keep) ws.conv_out[l] = out;
                std::vector<T> z(co * plane);
                for (std::size_t c = 0; c < co; ++c) {
                    const T g = gamma[c], b = beta[c];
                    const T* ip = out.data() + c * plane;
                    T* zp = z.data() + c * plane;
                    for (std::size_t i = 0; i < plane; ++i) zp[i] = ip[i] * g + b;
                }
                if (keep) {
                    ws.preact[l] = z;
                    ws.gamma[l] = gamma;
                }
                cur.assign(co * plane, T(0));
                for (std::size_t i = 0; i < co * plane; ++i) cur[i] = detail::silu(z[i]);
            } else {
                cur = std::move(out);
            }
        }

        const T wres = params_[layout_.res_scale];
        for (std::size_t i = 0; i < 3 * plane; ++i) cur[i] += wres * ws.x_cm[i];
        if (keep) ws.out_cm = cur;

        Tensor<T> out(F, 3, H, W);
        for (std::size_t f = 0; f < F; ++f)
            for (std::size_t c = 0; c < 3; ++c) {
                const std::size_t hw = H * W;
                const T* src = cur.data() + c * plane + f * hw;
                T* dst = out.data() + (f * 3 + c) * hw;
                std::copy_n(src, hw, dst);
            }
        return out;
    }

    void film_affine(std::size_t l, const T* et, const T* ec, std::vector<T>& gamma,
                     std::vector<T>& beta) const {
        const std::size_t co = gamma.size();
        const std::size_t d = static_cast<std::size_t>(arch_.embed_dim);
        const T* tw = params_.data() + layout_.film_tw[l];
        const T* tb = params_.data() + layout_.film_tb[l];
        const T* cw = params_.data() + layout_.film_cw[l];
        const T* cb = params_.data() + layout_.film_cb[l];
        for (std::size_t c = 0; c < co; ++c) {
            T gs = tb[c] + cb[c];
            T bs = tb[co + c] + cb[co + c];
            const T* twr = tw + c * d;
            const T* twr2 = tw + (co + c) * d;
            const T* cwr = cw + c * d;
            const T* cwr2 = cw + (co + c) * d;
            for (std::size_t k = 0; k < d; ++k) {
                gs += twr[k] * et[k] + cwr[k] * ec[k];
                bs += twr2[k] * et[k] + cwr2[k] * ec[k];
            }
            gamma[c] = T(1) + gs;
            beta[c] = bs;
        }
    }

    void backward_ws(const Tensor<T>& dout_fchw, const Workspace& ws, std::vector<T>& grad) const {
        const std::size_t F = ws.F, H = ws.H, W = ws.W;
        const std::size_t plane = F * H * W;
        const std::size_t n_conv = layout_.conv_w.size();
        const std::size_t d = static_cast<std::size_t>(arch_.embed_dim);

        std::vector<T> dcur(3 * plane, T(0));
        for (std::size_t f = 0; f < F; ++f)
            for (std::size_t c = 0; c < 3; ++c) {
                const std::size_t hw = H * W;
                const T* src = dout_fchw.data() + (f * 3 + c) * hw;
                T* dst = dcur.data() + c * plane + f * hw;
                std::copy_n(src, hw, dst);
            }

        // Residual path.
        T dres = T(0);
        for (std::size_t i = 0; i < 3 * plane; ++i) dres += dcur[i] * ws.x_cm[i];
        grad[layout_.res_scale] += dres;

        const T* et = params_.data() + layout_.t_emb +
                      static_cast<std::size_t>(ws.t) * arch_.embed_dim;
        const T* ec = params_.data() + layout_.c_emb +
                      static_cast<std::size_t>(ws.cond_row) * arch_.embed_dim;
        T* det = grad.data() + layout_.t_emb + static_cast<std::size_t>(ws.t) * arch_.embed_dim;
        T* dec = grad.data() + layout_.c_emb +
                 static_cast<std::size_t>(ws.cond_row) * arch_.embed_dim;

        for (std::size_t li = n_conv; li-- > 0;) {
            const std::size_t ci = static_cast<std::size_t>(layout_.ch[li]);
            const std::size_t co = static_cast<std::size_t>(layout_.ch[li + 1]);
            std::vector<T> din;
            const bool want_din = li > 0;
            if (want_din) din.assign(ci * plane, T(0));
            detail::conv3d_backward(ws.act[li].data(), params_.data() + layout_.conv_w[li],
                                    dcur.data(), want_din ? din.data() : nullptr,
                                    grad.data() + layout_.conv_w[li],
                                    grad.data() + layout_.conv_b[li], ci, co, F, H, W, want_din);
            if (!want_din) break;
            // din is grad wrt a_li = silu(z_{li-1}); push through activation + FiLM.
            const std::size_t l = li - 1;
            const std::vector<T>& z = ws.preact[l];
            const std::vector<T>& cv = ws.conv_out[l];
            const std::vector<T>& gamma = ws.gamma[l];
            std::vector<T> dgam(ci, T(0)), dbet(ci, T(0));
            dcur.assign(ci * plane, T(0));
            for (std::size_t c = 0; c < ci; ++c) {
                const T g = gamma[c];
                const T* dz_in = din.data() + c * plane;
                const T* zp = z.data() + c * plane;
                const T* cp = cv.data() + c * plane;
                T* dc = dcur.data() + c * plane;
                T ag = T(0), ab = T(0);
                for (std::size_t i = 0; i < plane; ++i) {
                    const T dz = dz_in[i] * detail::silu_grad(zp[i]);
                    ag += dz * cp[i];
                    ab += dz;
                    dc[i] = dz * g;
                }
                dgam[c] = ag;
                dbet[c] = ab;
            }
            // FiLM projection + embedding grads.
            const T* tw = params_.data() + layout_.film_tw[l];
            const T* cw = params_.data() + layout_.film_cw[l];
            T* dtw = grad.data() + layout_.film_tw[l];
            T* dtb = grad.data() + layout_.film_tb[l];
            T* dcw = grad.data() + layout_.film_cw[l];
            T* dcb = grad.data() + layout_.film_cb[l];
            for (std::size_t c = 0; c < ci; ++c) {
                const T dg = dgam[c], db = dbet[c];
                dtb[c] += dg;
                dtb[ci + c] += db;
                dcb[c] += dg;
                dcb[ci + c] += db;
                T* dtwr = dtw + c * d;
                T* dtwr2 = dtw + (ci + c) * d;
                T* dcwr = dcw + c * d;
                T* dcwr2 = dcw + (ci + c) * d;
                const T* twr = tw + c * d;
                const T* twr2 = tw + (ci + c) * d;
                const T* cwr = cw + c * d;
                const T* cwr2 = cw + (ci + c) * d;
                for (std::size_t k = 0; k < d; ++k) {
                    dtwr[k] += dg * et[k];
                    dtwr2[k] += db * et[k];
                    dcwr[k] += dg * ec[k];
                    dcwr2[k] += db * ec[k];
                    det[k] += dg * twr[k] + db * twr2[k];
                    dec[k] += dg * cwr[k] + db * cwr2[k];
                }
            }
        }
    }

    TinyArch arch_;
    detail::ParamLayout layout_;
    std::vector<T> params_;
};

using TinyModelF = TinyModel<float>;
using TinyModelD = TinyModel<double>;

// Denoiser-interface adapter over a frozen float model.
class TinyDenoiser final : public Denoiser {
public:
    explicit TinyDenoiser(TinyModelF model) : model_(std::move(model)) {}

    const TinyModelF& model() const { return model_; }
    TinyModelF& model() { return model_; }

    TensorF predict(const TensorF& x_t, int t, CondLabel cond) const override {
        return model_.forward(x_t, t, cond);
    }

    std::array<std::size_t, 4> input_shape() const override {
        const TinyArch& a = model_.arch();
        return {a.frames, 3, a.height, a.width};
    }

    bool supports_conditioning() const override { return true; }
    int total_steps() const override { return model_.arch().total_steps; }

    std::string describe() const override {
        return "tiny3d(params=" + std::to_string(model_.param_count()) + ")";
    }

private:
    TinyModelF model_;
};

} // namespace lpv::nn
