#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymu/common.hpp"

namespace ymu {

enum class LayerKind { Conv, C3, SPPF, Upsample, Concat, Detect };

// One row of the layer table. `inputs` holds source layer ids; -1 denotes the
// network input image.
struct LayerSpec {
  int id = 0;
  LayerKind kind = LayerKind::Conv;
  std::string name;
  std::vector<int> inputs;
  int in_channels = 0;  // sum over inputs for Concat
  int out_channels = 0;
  int kernel = 1;       // Conv: conv kernel; SPPF: pool window
  int stride = 1;
  int padding = 0;
  int bottlenecks = 0;  // C3 only
  bool shortcut = false;  // C3 only
};

struct ModelGraph {
  std::vector<LayerSpec> layers;
  int num_classes = 0;
  std::array<int, 3> strides{8, 16, 32};
  int reg_max = 16;
  int box_width = 64;   // detect head, box-branch hidden channels
  int cls_width = 192;  // detect head, class-branch hidden channels

  const LayerSpec& detect_layer() const {
    for (const LayerSpec& l : layers)
      if (l.kind == LayerKind::Detect) return l;
    throw std::logic_error("graph has no detect layer");
  }
  int map_channels() const { return 4 * reg_max + num_classes; }
};

inline void validate(const ModelGraph& g) {
  if (g.num_classes < 1) throw std::invalid_argument("graph: num_classes must be >= 1");
  int detect_count = 0;
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    const LayerSpec& l = g.layers[i];
    if (l.id != static_cast<int>(i))
      throw std::logic_error("graph: layer ids must be dense and ordered");
    if (l.inputs.empty()) throw std::logic_error("graph: layer without inputs");
    for (int src : l.inputs)
      if (src < -1 || src >= l.id)
        throw std::logic_error("graph: inputs must reference earlier layers");
    switch (l.kind) {
      case LayerKind::Concat:
        if (l.inputs.size() < 2)
          throw std::logic_error("graph: concat needs at least two inputs");
        break;
      case LayerKind::Detect: {
        ++detect_count;
        if (l.inputs.size() != 3)
          throw std::logic_error("graph: detect needs exactly three inputs");
        static constexpr std::array<int, 3> want{192, 384, 768};
        for (int k = 0; k < 3; ++k)
          if (g.layers[l.inputs[k]].out_channels != want[k])
            throw std::logic_error("graph: detect input widths must be (192,384,768)");
        break;
      }
      default:
        if (l.inputs.size() != 1)
          throw std::logic_error("graph: layer needs exactly one input");
    }
  }
  if (detect_count != 1) throw std::logic_error("graph: exactly one detect layer required");
}

inline ModelGraph build_yolov5mu(int num_classes) {
  if (num_classes < 1)
    throw std::invalid_argument("build_yolov5mu: num_classes must be >= 1");

  ModelGraph g;
  g.num_classes = num_classes;
  auto out_ch = [&g](int src) {
    return src < 0 ? 3 : g.layers[src].out_channels;
  };
  auto conv = [&](const std::string& name, int src, int c_out, int k, int s) {
    LayerSpec l;
    l.id = static_cast<int>(g.layers.size());
    l.kind = LayerKind::Conv;
    l.name = name;
    l.inputs = {src};
    l.in_channels = out_ch(src);
    l.out_channels = c_out;
    l.kernel = k;
    l.stride = s;
    l.padding = k / 2;  // 6->2 is set by the caller below
    g.layers.push_back(l);
  };
  auto c3 = [&](const std::string& name, int src, int c_out, int n, bool shortcut) {
    LayerSpec l;
    l.id = static_cast<int>(g.layers.size());
    l.kind = LayerKind::C3;
    l.name = name;
    l.inputs = {src};
    l.in_channels = out_ch(src);
    l.out_channels = c_out;
    l.bottlenecks = n;
    l.shortcut = shortcut;
    g.layers.push_back(l);
  };
  auto simple = [&](LayerKind kind, const std::string& name, std::vector<int> srcs) {
    LayerSpec l;
    l.id = static_cast<int>(g.layers.size());
    l.kind = kind;
    l.name = name;
    l.inputs = std::move(srcs);
    l.in_channels = 0;
    for (int s : l.inputs) l.in_channels += out_ch(s);
    l.out_channels = l.in_channels;
    if (kind == LayerKind::SPPF) l.kernel = 5;
    if (kind == LayerKind::Upsample) l.stride = 2;
    g.layers.push_back(l);
  };

  conv("Conv1", -1, 48, 6, 2);
  g.layers.back().padding = 2;
  conv("Conv2", 0, 96, 3, 2);      // 1
  c3("C3-1", 1, 96, 2, true);      // 2
  conv("Conv3", 2, 192, 3, 2);     // 3
  c3("C3-2", 3, 192, 4, true);     // 4
  conv("Conv4", 4, 384, 3, 2);     // 5
  c3("C3-3", 5, 384, 6, true);     // 6
  conv("Conv5", 6, 768, 3, 2);     // 7
  c3("C3-4", 7, 768, 2, true);     // 8
  simple(LayerKind::SPPF, "SPPF", {8});   // 9
  conv("Conv6", 9, 384, 1, 1);     // 10
  simple(LayerKind::Upsample, "Upsample", {10});  // 11
  simple(LayerKind::Concat, "Concat", {11, 6});   // 12 -> 768
  c3("C3-5", 12, 384, 2, false);   // 13
  conv("Conv7", 13, 192, 1, 1);    // 14
  simple(LayerKind::Upsample, "Upsample", {14});  // 15
  simple(LayerKind::Concat, "Concat", {15, 4});   // 16 -> 384
  c3("C3-6", 16, 192, 2, false);   // 17, stride-8 feature
  conv("Conv8", 17, 192, 3, 2);    // 18
  simple(LayerKind::Concat, "Concat", {18, 14});  // 19 -> 384
  c3("C3-7", 19, 384, 2, false);   // 20, stride-16 feature
  conv("Conv9", 20, 384, 3, 2);    // 21
  simple(LayerKind::Concat, "Concat", {21, 10});  // 22 -> 768
  c3("C3-8", 22, 768, 2, false);   // 23, stride-32 feature

  LayerSpec det;
  det.id = static_cast<int>(g.layers.size());
  det.kind = LayerKind::Detect;
  det.name = "Detect";
  det.inputs = {17, 20, 23};
  det.in_channels = 192 + 384 + 768;
  det.out_channels = g.map_channels();
  g.layers.push_back(det);

  validate(g);
  return g;
}

// ----- weight enumeration: the single source of truth for parameter -----
// ----- accounting, initialization, persistence, and execution        -----

enum class WeightInit { UniformFanIn, Zeros, Ones, Ramp };

struct WeightSpec {
  std::string name;       // "layer<id>." + dotted role path
  std::vector<int> dims;
  WeightInit init = WeightInit::UniformFanIn;
  int fan_in = 1;
  // bn running mean/var live in the store but are statistics, not
  // parameters; only counted tensors enter the parameter table
  bool counted = true;

  std::size_t elements() const {
    std::size_t n = 1;
    for (int d : dims) n *= static_cast<std::size_t>(d);
    return n;
  }
};

namespace detail {

inline void push_conv_block(std::vector<WeightSpec>& out, const std::string& prefix,
                            int c_in, int c_out, int k) {
  const int fan = c_in * k * k;
  out.push_back({prefix + "conv.weight", {c_out, c_in, k, k}, WeightInit::UniformFanIn, fan, true});
  out.push_back({prefix + "bn.gamma", {c_out}, WeightInit::Ones, fan, true});
  out.push_back({prefix + "bn.beta", {c_out}, WeightInit::Zeros, fan, true});
  out.push_back({prefix + "bn.mean", {c_out}, WeightInit::Zeros, fan, false});
  out.push_back({prefix + "bn.var", {c_out}, WeightInit::Ones, fan, false});
}

inline void push_c3(std::vector<WeightSpec>& out, const std::string& prefix,
                    int c_in, int c_out, int n) {
  const int ch = c_out / 2;
  push_conv_block(out, prefix + "cv1.", c_in, ch, 1);
  push_conv_block(out, prefix + "cv2.", c_in, ch, 1);
  for (int i = 0; i < n; ++i) {
    const std::string m = prefix + "m" + std::to_string(i) + ".";
    push_conv_block(out, m + "cv1.", ch, ch, 1);
    push_conv_block(out, m + "cv2.", ch, ch, 3);
  }
  push_conv_block(out, prefix + "cv3.", 2 * ch, c_out, 1);
}

}  // namespace detail

// Tensor list in canonical order: per layer by id, within a layer as pushed
// here. init_weights fills them in exactly this order from one random stream.
inline std::vector<WeightSpec> expected_weights(const ModelGraph& g) {
  std::vector<WeightSpec> out;
  for (const LayerSpec& l : g.layers) {
    const std::string prefix = "layer" + std::to_string(l.id) + ".";
    switch (l.kind) {
      case LayerKind::Conv:
        detail::push_conv_block(out, prefix, l.in_channels, l.out_channels, l.kernel);
        break;
      case LayerKind::C3:
        detail::push_c3(out, prefix, l.in_channels, l.out_channels, l.bottlenecks);
        break;
      case LayerKind::SPPF: {
        const int half = l.in_channels / 2;
        detail::push_conv_block(out, prefix + "cv1.", l.in_channels, half, 1);
        detail::push_conv_block(out, prefix + "cv2.", 4 * half, l.out_channels, 1);
        break;
      }
      case LayerKind::Detect: {
        for (int i = 0; i < 3; ++i) {
          const int c = g.layers[l.inputs[i]].out_channels;
          const std::string bi = prefix + "box" + std::to_string(i) + ".";
          const std::string ci = prefix + "cls" + std::to_string(i) + ".";
          detail::push_conv_block(out, bi + "cv1.", c, g.box_width, 3);
          detail::push_conv_block(out, bi + "cv2.", g.box_width, g.box_width, 3);
          out.push_back({bi + "pred.weight", {4 * g.reg_max, g.box_width, 1, 1},
                         WeightInit::UniformFanIn, g.box_width});
          out.push_back({bi + "pred.bias", {4 * g.reg_max},
                         WeightInit::UniformFanIn, g.box_width});
          detail::push_conv_block(out, ci + "cv1.", c, g.cls_width, 3);
          detail::push_conv_block(out, ci + "cv2.", g.cls_width, g.cls_width, 3);
          out.push_back({ci + "pred.weight", {g.num_classes, g.cls_width, 1, 1},
                         WeightInit::UniformFanIn, g.cls_width});
          out.push_back({ci + "pred.bias", {g.num_classes},
                         WeightInit::UniformFanIn, g.cls_width});
        }
        out.push_back({prefix + "dfl.weight", {g.reg_max}, WeightInit::Ramp, g.reg_max});
        break;
      }
      case LayerKind::Upsample:
      case LayerKind::Concat:
        break;
    }
  }
  return out;
}

struct ParamRow {
  int layer_id = 0;
  std::string name;
  long long params = 0;
};

struct ParamTable {
  std::vector<ParamRow> rows;
  long long total = 0;
};

inline ParamTable param_count(const ModelGraph& g) {
  ParamTable table;
  for (const LayerSpec& l : g.layers)
    table.rows.push_back({l.id, l.name, 0});
  for (const WeightSpec& w : expected_weights(g)) {
    if (!w.counted) continue;
    // name is "layer<id>.<...>"
    const std::size_t dot = w.name.find('.');
    const int id = std::stoi(w.name.substr(5, dot - 5));
    table.rows[id].params += static_cast<long long>(w.elements());
  }
  for (const ParamRow& r : table.rows) table.total += r.params;
  return table;
}

struct ShapeRow {
  int layer_id = 0;
  std::string name;
  int c = 0, h = 0, w = 0;  // Detect rows carry c only (it emits three maps)
};

inline std::vector<ShapeRow> infer_shapes(const ModelGraph& g, int input_h, int input_w) {
  if (input_h < 32 || input_w < 32 || input_h % 32 != 0 || input_w % 32 != 0)
    throw std::invalid_argument("infer_shapes: input size must be a positive multiple of 32");
  std::vector<ShapeRow> rows;
  rows.reserve(g.layers.size());
  auto src_shape = [&](int id) -> std::array<int, 3> {
    if (id < 0) return {3, input_h, input_w};
    return {rows[id].c, rows[id].h, rows[id].w};
  };
  for (const LayerSpec& l : g.layers) {
    ShapeRow r{l.id, l.name, 0, 0, 0};
    const auto in = src_shape(l.inputs[0]);
    switch (l.kind) {
      case LayerKind::Conv:
        r.c = l.out_channels;
        r.h = (in[1] + 2 * l.padding - l.kernel) / l.stride + 1;
        r.w = (in[2] + 2 * l.padding - l.kernel) / l.stride + 1;
        break;
      case LayerKind::C3:
      case LayerKind::SPPF:
        r.c = l.out_channels;
        r.h = in[1];
        r.w = in[2];
        break;
      case LayerKind::Upsample:
        r.c = in[0];
        r.h = in[1] * l.stride;
        r.w = in[2] * l.stride;
        break;
      case LayerKind::Concat: {
        r.h = in[1];
        r.w = in[2];
        for (int s : l.inputs) {
          const auto is = src_shape(s);
          if (is[1] != r.h || is[2] != r.w)
            throw std::logic_error("infer_shapes: concat spatial mismatch");
          r.c += is[0];
        }
        break;
      }
      case LayerKind::Detect:
        r.c = g.map_channels();
        break;
    }
    rows.push_back(r);
  }
  return rows;
}

// Shapes (C,H,W) of the three detect output maps, finest stride first.
inline std::array<std::array<int, 3>, 3> detect_output_shapes(const ModelGraph& g,
                                                              int input_h, int input_w) {
  const auto rows = infer_shapes(g, input_h, input_w);
  const LayerSpec& det = g.detect_layer();
  std::array<std::array<int, 3>, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const ShapeRow& r = rows[det.inputs[i]];
    out[i] = {g.map_channels(), r.h, r.w};
  }
  return out;
}

// Multiply-accumulate count of one layer's convolutions at the shapes in
// `rows`. Batch norm is folded, activations and biases are not counted.
inline unsigned long long layer_macs(const ModelGraph& g, const std::vector<ShapeRow>& rows,
                                     const LayerSpec& l, int input_h, int input_w) {
  auto src_hw = [&](int id) -> std::array<int, 2> {
    if (id < 0) return {input_h, input_w};
    return {rows[id].h, rows[id].w};
  };
  auto conv_macs = [](int c_in, int c_out, int k, int out_h, int out_w) {
    return static_cast<unsigned long long>(out_h) * out_w * c_out * c_in * k * k;
  };

  unsigned long long total = 0;
  const auto in_hw = src_hw(l.inputs[0]);
  switch (l.kind) {
    case LayerKind::Conv: {
      total += conv_macs(l.in_channels, l.out_channels, l.kernel,
                         rows[l.id].h, rows[l.id].w);
      break;
    }
    case LayerKind::C3: {
      const int ch = l.out_channels / 2;
      const int h = in_hw[0], w = in_hw[1];
      total += conv_macs(l.in_channels, ch, 1, h, w) * 2;   // cv1, cv2
      for (int i = 0; i < l.bottlenecks; ++i) {
        total += conv_macs(ch, ch, 1, h, w);
        total += conv_macs(ch, ch, 3, h, w);
      }
      total += conv_macs(2 * ch, l.out_channels, 1, h, w);  // cv3
      break;
    }
    case LayerKind::SPPF: {
      const int half = l.in_channels / 2;
      const int h = in_hw[0], w = in_hw[1];
      total += conv_macs(l.in_channels, half, 1, h, w);
      total += conv_macs(4 * half, l.out_channels, 1, h, w);
      break;
    }
    case LayerKind::Detect: {
      for (int i = 0; i < 3; ++i) {
        const int c = g.layers[l.inputs[i]].out_channels;
        const auto hw = src_hw(l.inputs[i]);
        const int h = hw[0], w = hw[1];
        total += conv_macs(c, g.box_width, 3, h, w);
        total += conv_macs(g.box_width, g.box_width, 3, h, w);
        total += conv_macs(g.box_width, 4 * g.reg_max, 1, h, w);
        total += conv_macs(c, g.cls_width, 3, h, w);
        total += conv_macs(g.cls_width, g.cls_width, 3, h, w);
        total += conv_macs(g.cls_width, g.num_classes, 1, h, w);
      }
      break;
    }
    case LayerKind::Upsample:
    case LayerKind::Concat:
      break;
  }
  return total;
}

inline unsigned long long estimate_macs(const ModelGraph& g, int input_h, int input_w) {
  const auto rows = infer_shapes(g, input_h, input_w);
  unsigned long long total = 0;
  for (const LayerSpec& l : g.layers) total += layer_macs(g, rows, l, input_h, input_w);
  return total;
}

inline double estimate_flops(const ModelGraph& g, int input_h, int input_w) {
  return 2.0 * static_cast<double>(estimate_macs(g, input_h, input_w)) / 1e9;
}

}  // namespace ymu
