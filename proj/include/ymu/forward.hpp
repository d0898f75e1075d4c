#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ymu/model.hpp"
#include "ymu/tensor.hpp"
#include "ymu/weights.hpp"

namespace ymu {

inline constexpr double kBnEps = 1e-3;

namespace detail {

// Conv -> batch norm -> SiLU, reading tensors "<prefix>conv.weight" and
// "<prefix>bn.{gamma,beta,mean,var}".
inline Tensor conv_block(const Tensor& x, const WeightStore& w,
                         const std::string& prefix, int stride, int padding) {
  const NamedTensor& cw = w.get(prefix + "conv.weight");
  Tensor y = conv2d_raw(x, cw.data.data(), cw.dims[0], cw.dims[1], cw.dims[2],
                        cw.dims[3], {}, stride, padding);
  y = batch_norm(y, w.get(prefix + "bn.gamma").data, w.get(prefix + "bn.beta").data,
                 w.get(prefix + "bn.mean").data, w.get(prefix + "bn.var").data, kBnEps);
  return silu(y);
}

inline Tensor pred_conv(const Tensor& x, const WeightStore& w, const std::string& prefix) {
  const NamedTensor& cw = w.get(prefix + "pred.weight");
  const NamedTensor& cb = w.get(prefix + "pred.bias");
  return conv2d_raw(x, cw.data.data(), cw.dims[0], cw.dims[1], cw.dims[2],
                    cw.dims[3], cb.data, 1, 0);
}

inline Tensor run_c3(const Tensor& x, const WeightStore& w, const LayerSpec& l) {
  const std::string prefix = "layer" + std::to_string(l.id) + ".";
  Tensor main = conv_block(x, w, prefix + "cv1.", 1, 0);
  for (int i = 0; i < l.bottlenecks; ++i) {
    const std::string m = prefix + "m" + std::to_string(i) + ".";
    Tensor y = conv_block(main, w, m + "cv1.", 1, 0);
    y = conv_block(y, w, m + "cv2.", 1, 1);
    main = l.shortcut ? add(main, y) : std::move(y);
  }
  Tensor side = conv_block(x, w, prefix + "cv2.", 1, 0);
  Tensor cat = concat_channels({&main, &side});
  return conv_block(cat, w, prefix + "cv3.", 1, 0);
}

inline Tensor run_sppf(const Tensor& x, const WeightStore& w, const LayerSpec& l) {
  const std::string prefix = "layer" + std::to_string(l.id) + ".";
  Tensor a = conv_block(x, w, prefix + "cv1.", 1, 0);
  Tensor p1 = max_pool2d(a, l.kernel, 1, l.kernel / 2);
  Tensor p2 = max_pool2d(p1, l.kernel, 1, l.kernel / 2);
  Tensor p3 = max_pool2d(p2, l.kernel, 1, l.kernel / 2);
  Tensor cat = concat_channels({&a, &p1, &p2, &p3});
  return conv_block(cat, w, prefix + "cv2.", 1, 0);
}

inline Tensor run_detect_level(const Tensor& x, const WeightStore& w,
                               const std::string& prefix, int level) {
  const std::string bi = prefix + "box" + std::to_string(level) + ".";
  const std::string ci = prefix + "cls" + std::to_string(level) + ".";
  Tensor box = conv_block(x, w, bi + "cv1.", 1, 1);
  box = conv_block(box, w, bi + "cv2.", 1, 1);
  box = pred_conv(box, w, bi);
  Tensor cls = conv_block(x, w, ci + "cv1.", 1, 1);
  cls = conv_block(cls, w, ci + "cv2.", 1, 1);
  cls = pred_conv(cls, w, ci);
  return concat_channels({&box, &cls});
}

}  // namespace detail

// Runs the full graph on one image, returning the three raw prediction maps
// (channels 4*reg_max + num_classes) at strides 8, 16, 32. No activation is
// applied to the map values; decoding happens downstream.
inline std::array<Tensor, 3> forward(const ModelGraph& g, const WeightStore& weights,
                                     const Tensor& image) {
  if (image.n() != 1 || image.c() != 3)
    throw std::invalid_argument("forward: image must have shape (1,3,H,W)");
  if (image.h() % 32 != 0 || image.w() % 32 != 0)
    throw std::invalid_argument("forward: image sides must be multiples of 32");
  validate_weights(g, weights);

  std::vector<std::optional<Tensor>> outs(g.layers.size());
  auto src = [&](int id) -> const Tensor& {
    return id < 0 ? image : *outs[id];
  };

  std::array<Tensor, 3> maps;
  for (const LayerSpec& l : g.layers) {
    switch (l.kind) {
      case LayerKind::Conv:
        outs[l.id] = detail::conv_block(src(l.inputs[0]), weights,
                                        "layer" + std::to_string(l.id) + ".",
                                        l.stride, l.padding);
        break;
      case LayerKind::C3:
        outs[l.id] = detail::run_c3(src(l.inputs[0]), weights, l);
        break;
      case LayerKind::SPPF:
        outs[l.id] = detail::run_sppf(src(l.inputs[0]), weights, l);
        break;
      case LayerKind::Upsample:
        outs[l.id] = upsample_nearest(src(l.inputs[0]), l.stride);
        break;
      case LayerKind::Concat: {
        std::vector<const Tensor*> parts;
        for (int s : l.inputs) parts.push_back(&src(s));
        outs[l.id] = concat_channels(parts);
        break;
      }
      case LayerKind::Detect: {
        const std::string prefix = "layer" + std::to_string(l.id) + ".";
        for (int i = 0; i < 3; ++i)
          maps[i] = detail::run_detect_level(src(l.inputs[i]), weights, prefix, i);
        break;
      }
    }
  }
  return maps;
}

}  // namespace ymu
