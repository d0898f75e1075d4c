#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ymu/common.hpp"

namespace ymu {

// Dense rank-4 float tensor, NCHW, row-major with width fastest.
//
// Arithmetic contract shared by every op and by the reference oracles in the
// test suite: per-element reductions accumulate in double in a fixed order
// and are rounded to float once, on store. Padding never contributes a
// summation term (for conv it behaves as zero, for max-pool as -inf).
class Tensor {
 public:
  Tensor() : shape_{1, 1, 1, 1}, data_(1, 0.0f) {}

  Tensor(int n, int c, int h, int w, float fill = 0.0f)
      : shape_{n, c, h, w} {
    if (n < 1 || c < 1 || h < 1 || w < 1)
      throw std::invalid_argument("Tensor: all dimensions must be >= 1");
    data_.assign(static_cast<std::size_t>(n) * c * h * w, fill);
  }

  static Tensor from_data(int n, int c, int h, int w, std::vector<float> data) {
    Tensor t(n, c, h, w);
    if (data.size() != t.size())
      throw std::invalid_argument("Tensor::from_data: data length " +
                                  std::to_string(data.size()) + " != shape product " +
                                  std::to_string(t.size()));
    t.data_ = std::move(data);
    return t;
  }

  int n() const { return shape_[0]; }
  int c() const { return shape_[1]; }
  int h() const { return shape_[2]; }
  int w() const { return shape_[3]; }
  const std::array<int, 4>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int n, int c, int y, int x) const {
    return ((static_cast<std::size_t>(n) * shape_[1] + c) * shape_[2] + y) * shape_[3] + x;
  }

  float& at(int n, int c, int y, int x) { return data_[index(n, c, y, x)]; }
  float at(int n, int c, int y, int x) const { return data_[index(n, c, y, x)]; }

  const float* row(int n, int c, int y) const { return data_.data() + index(n, c, y, 0); }
  float* row(int n, int c, int y) { return data_.data() + index(n, c, y, 0); }

  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

 private:
  std::array<int, 4> shape_;
  std::vector<float> data_;
};

// Direct convolution over a raw weight buffer laid out [outC, inC, kH, kW].
// Zero padding, stride >= 1. Each output element accumulates over
// (inC, kH, kW) in that order, in double.
inline Tensor conv2d_raw(const Tensor& input, const float* weights, int out_c,
                         int in_c, int kh, int kw, std::span<const float> bias,
                         int stride, int padding) {
  if (stride < 1) throw std::invalid_argument("conv2d: stride must be positive");
  if (padding < 0) throw std::invalid_argument("conv2d: padding must be non-negative");
  if (input.c() != in_c)
    throw std::invalid_argument("conv2d: input has " + std::to_string(input.c()) +
                                " channels, weights expect " + std::to_string(in_c));
  if (!bias.empty() && static_cast<int>(bias.size()) != out_c)
    throw std::invalid_argument("conv2d: bias length must equal output channels");

  const int in_h = input.h(), in_w = input.w();
  const int num_h = in_h + 2 * padding - kh;
  const int num_w = in_w + 2 * padding - kw;
  if (num_h < 0 || num_w < 0)
    throw std::invalid_argument("conv2d: kernel larger than padded input");
  const int out_h = num_h / stride + 1;
  const int out_w = num_w / stride + 1;

  Tensor out(input.n(), out_c, out_h, out_w);
  std::vector<double> acc(static_cast<std::size_t>(out_w));
  const std::size_t kplane = static_cast<std::size_t>(kh) * kw;

  for (int n = 0; n < input.n(); ++n) {
    for (int oc = 0; oc < out_c; ++oc) {
      const double b = bias.empty() ? 0.0 : static_cast<double>(bias[oc]);
      const float* wbase = weights + static_cast<std::size_t>(oc) * in_c * kplane;
      for (int oy = 0; oy < out_h; ++oy) {
        acc.assign(static_cast<std::size_t>(out_w), b);
        for (int ic = 0; ic < in_c; ++ic) {
          const float* wchan = wbase + static_cast<std::size_t>(ic) * kplane;
          for (int ky = 0; ky < kh; ++ky) {
            const int iy = oy * stride - padding + ky;
            if (iy < 0 || iy >= in_h) continue;
            const float* in_row = input.row(n, ic, iy);
            for (int kx = 0; kx < kw; ++kx) {
              // ox range keeping ix = ox*stride - padding + kx inside the row
              int ox_lo = 0;
              if (padding - kx > 0) ox_lo = (padding - kx + stride - 1) / stride;
              const int num = in_w - 1 + padding - kx;
              if (num < 0) continue;
              int ox_hi = num / stride;
              if (ox_hi > out_w - 1) ox_hi = out_w - 1;
              if (ox_lo > ox_hi) continue;

              const double wv = static_cast<double>(wchan[ky * kw + kx]);
              const float* ip = in_row + (ox_lo * stride - padding + kx);
              double* ap = acc.data() + ox_lo;
              const int count = ox_hi - ox_lo + 1;
              if (stride == 1) {
                for (int i = 0; i < count; ++i) ap[i] += static_cast<double>(ip[i]) * wv;
              } else {
                for (int i = 0; i < count; ++i)
                  ap[i] += static_cast<double>(ip[static_cast<std::size_t>(i) * stride]) * wv;
              }
            }
          }
        }
        float* orow = out.row(n, oc, oy);
        for (int ox = 0; ox < out_w; ++ox) orow[ox] = static_cast<float>(acc[ox]);
      }
    }
  }
  return out;
}

inline Tensor conv2d(const Tensor& input, const Tensor& weights,
                     std::span<const float> bias, int stride, int padding) {
  return conv2d_raw(input, weights.data().data(), weights.n(), weights.c(),
                    weights.h(), weights.w(), bias, stride, padding);
}

// Inference-mode batch norm: gamma * (x - mean) / sqrt(var + eps) + beta.
inline Tensor batch_norm(const Tensor& input, std::span<const float> gamma,
                         std::span<const float> beta, std::span<const float> mean,
                         std::span<const float> var, double eps) {
  const std::size_t c = static_cast<std::size_t>(input.c());
  if (gamma.size() != c || beta.size() != c || mean.size() != c || var.size() != c)
    throw std::invalid_argument("batch_norm: per-channel vectors must have length C");
  if (eps < 0.0) throw std::invalid_argument("batch_norm: eps must be non-negative");
  for (float v : var)
    if (v < 0.0f) throw std::invalid_argument("batch_norm: negative variance");

  Tensor out = input;
  const std::size_t plane = static_cast<std::size_t>(input.h()) * input.w();
  for (int n = 0; n < input.n(); ++n) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double g = gamma[ch], b = beta[ch], m = mean[ch];
      const double inv = 1.0 / std::sqrt(static_cast<double>(var[ch]) + eps);
      float* p = out.data().data() + (static_cast<std::size_t>(n) * c + ch) * plane;
      for (std::size_t i = 0; i < plane; ++i)
        p[i] = static_cast<float>(g * (static_cast<double>(p[i]) - m) * inv + b);
    }
  }
  return out;
}

inline Tensor sigmoid(const Tensor& input) {
  Tensor out = input;
  for (float& v : out.data()) v = static_cast<float>(sigmoid_scalar(v));
  return out;
}

inline Tensor silu(const Tensor& input) {
  Tensor out = input;
  for (float& v : out.data())
    v = static_cast<float>(static_cast<double>(v) * sigmoid_scalar(v));
  return out;
}

// Softmax along one axis, stabilized by max subtraction. Sums run in axis
// index order.
inline Tensor softmax(const Tensor& input, int axis) {
  if (axis < 0 || axis > 3) throw std::invalid_argument("softmax: axis out of range");
  const auto& s = input.shape();
  const int len = s[axis];
  std::array<std::size_t, 4> strides;
  strides[3] = 1;
  strides[2] = static_cast<std::size_t>(s[3]);
  strides[1] = strides[2] * s[2];
  strides[0] = strides[1] * s[1];
  const std::size_t step = strides[axis];

  Tensor out = input;
  float* p = out.data().data();
  std::array<int, 3> rest{};
  int k = 0;
  for (int d = 0; d < 4; ++d)
    if (d != axis) rest[k++] = d;

  for (int a = 0; a < s[rest[0]]; ++a)
    for (int b = 0; b < s[rest[1]]; ++b)
      for (int c = 0; c < s[rest[2]]; ++c) {
        const std::size_t base =
            a * strides[rest[0]] + b * strides[rest[1]] + c * strides[rest[2]];
        double mx = p[base];
        for (int i = 1; i < len; ++i)
          mx = std::max(mx, static_cast<double>(p[base + i * step]));
        double sum = 0.0;
        for (int i = 0; i < len; ++i)
          sum += std::exp(static_cast<double>(p[base + i * step]) - mx);
        for (int i = 0; i < len; ++i) {
          const std::size_t at = base + i * step;
          p[at] = static_cast<float>(std::exp(static_cast<double>(p[at]) - mx) / sum);
        }
      }
  return out;
}

inline Tensor max_pool2d(const Tensor& input, int k, int stride, int padding) {
  if (k < 1 || stride < 1 || padding < 0)
    throw std::invalid_argument("max_pool2d: bad window parameters");
  const int in_h = input.h(), in_w = input.w();
  const int num_h = in_h + 2 * padding - k;
  const int num_w = in_w + 2 * padding - k;
  if (num_h < 0 || num_w < 0)
    throw std::invalid_argument("max_pool2d: window larger than padded input");
  const int out_h = num_h / stride + 1;
  const int out_w = num_w / stride + 1;

  Tensor out(input.n(), input.c(), out_h, out_w);
  for (int n = 0; n < input.n(); ++n)
    for (int c = 0; c < input.c(); ++c)
      for (int oy = 0; oy < out_h; ++oy) {
        float* orow = out.row(n, c, oy);
        for (int ox = 0; ox < out_w; ++ox) {
          float m = -std::numeric_limits<float>::infinity();
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * stride - padding + ky;
            if (iy < 0 || iy >= in_h) continue;
            const float* irow = input.row(n, c, iy);
            for (int kx = 0; kx < k; ++kx) {
              const int ix = ox * stride - padding + kx;
              if (ix < 0 || ix >= in_w) continue;
              m = std::max(m, irow[ix]);
            }
          }
          orow[ox] = m;
        }
      }
  return out;
}

inline Tensor upsample_nearest(const Tensor& input, int factor) {
  if (factor < 1) throw std::invalid_argument("upsample_nearest: factor must be >= 1");
  if (factor == 1) return input;
  Tensor out(input.n(), input.c(), input.h() * factor, input.w() * factor);
  for (int n = 0; n < input.n(); ++n)
    for (int c = 0; c < input.c(); ++c)
      for (int oy = 0; oy < out.h(); ++oy) {
        const float* irow = input.row(n, c, oy / factor);
        float* orow = out.row(n, c, oy);
        for (int ox = 0; ox < out.w(); ++ox) orow[ox] = irow[ox / factor];
      }
  return out;
}

// Channel concatenation; all other dims must agree, inputs keep their order.
inline Tensor concat_channels(const std::vector<const Tensor*>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: needs at least one input");
  const Tensor& first = *parts.front();
  int total_c = 0;
  for (const Tensor* t : parts) {
    if (t->n() != first.n() || t->h() != first.h() || t->w() != first.w())
      throw std::invalid_argument("concat: non-channel dimensions differ");
    total_c += t->c();
  }
  Tensor out(first.n(), total_c, first.h(), first.w());
  const std::size_t plane = static_cast<std::size_t>(first.h()) * first.w();
  for (int n = 0; n < first.n(); ++n) {
    std::size_t coff = 0;
    for (const Tensor* t : parts) {
      const std::size_t count = static_cast<std::size_t>(t->c()) * plane;
      const float* src = t->data().data() + static_cast<std::size_t>(n) * count;
      float* dst = out.data().data() +
                   (static_cast<std::size_t>(n) * total_c + coff) * plane;
      for (std::size_t i = 0; i < count; ++i) dst[i] = src[i];
      coff += t->c();
    }
  }
  return out;
}

inline Tensor add(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("add: shape mismatch");
  Tensor out = a;
  const float* pb = b.data().data();
  float* po = out.data().data();
  for (std::size_t i = 0; i < out.size(); ++i) po[i] += pb[i];
  return out;
}

}  // namespace ymu
