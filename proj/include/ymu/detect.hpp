#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "ymu/common.hpp"
#include "ymu/tensor.hpp"

namespace ymu {

inline constexpr double kDefaultConfThreshold = 0.25;
inline constexpr double kDefaultIouThreshold = 0.45;
inline constexpr int kRegMax = 16;

struct Detection {
  Box box;
  int class_id = 0;
  float score = 0;
};

struct AnchorPoint {
  float cx = 0, cy = 0;  // grid units: cell index + 0.5
  int stride = 8;
};

inline std::vector<AnchorPoint> make_anchor_points(
    const std::vector<std::array<int, 2>>& level_hw, std::span<const int> strides) {
  if (level_hw.size() != strides.size())
    throw std::invalid_argument("make_anchor_points: one shape per stride required");
  std::vector<AnchorPoint> points;
  for (std::size_t lvl = 0; lvl < level_hw.size(); ++lvl) {
    const auto [h, w] = level_hw[lvl];
    if (h < 1 || w < 1)
      throw std::invalid_argument("make_anchor_points: level dims must be positive");
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j)
        points.push_back({static_cast<float>(j) + 0.5f, static_cast<float>(i) + 0.5f,
                          strides[lvl]});
  }
  return points;
}

// Softmax expectation over the 16 distance bins: sum of i * p_i, in [0, 15].
inline double dfl_expectation(std::span<const float> bin_logits) {
  if (bin_logits.size() != kRegMax)
    throw std::invalid_argument("dfl_expectation: expected 16 bin logits");
  double mx = bin_logits[0];
  for (float v : bin_logits) mx = std::max(mx, static_cast<double>(v));
  double sum = 0.0;
  for (float v : bin_logits) sum += std::exp(static_cast<double>(v) - mx);
  double expect = 0.0;
  for (int i = 0; i < kRegMax; ++i)
    expect += i * (std::exp(static_cast<double>(bin_logits[i]) - mx) / sum);
  return expect;
}

// Turns the three raw maps into threshold-passing candidates. Channel layout
// per cell: 4 groups of 16 distance-bin logits (left, top, right, bottom),
// then one logit per class. Candidates are emitted level by level, cells
// row-major, classes ascending; boxes are in input-image pixels, unclipped.
inline std::vector<Detection> decode_predictions(std::span<const Tensor> maps,
                                                 const std::vector<AnchorPoint>& anchors,
                                                 double conf_threshold) {
  std::size_t cells = 0;
  int channels = -1;
  for (const Tensor& m : maps) {
    if (channels == -1) channels = m.c();
    if (m.c() != channels)
      throw std::invalid_argument("decode: maps disagree on channel count");
    cells += static_cast<std::size_t>(m.h()) * m.w();
  }
  const int num_classes = channels - 4 * kRegMax;
  if (num_classes < 1)
    throw std::invalid_argument("decode: map channels must be 64 + num_classes");
  if (cells != anchors.size())
    throw std::invalid_argument("decode: anchor count does not match map cells");

  std::vector<Detection> out;
  std::size_t cell = 0;
  std::array<float, kRegMax> bins;
  for (const Tensor& m : maps)
    for (int y = 0; y < m.h(); ++y)
      for (int x = 0; x < m.w(); ++x, ++cell) {
        const AnchorPoint& a = anchors[cell];
        double dist[4];
        for (int side = 0; side < 4; ++side) {
          for (int b = 0; b < kRegMax; ++b)
            bins[b] = m.at(0, side * kRegMax + b, y, x);
          dist[side] = dfl_expectation(bins);
        }
        const double s = a.stride;
        Box box{static_cast<float>((a.cx - dist[0]) * s),
                static_cast<float>((a.cy - dist[1]) * s),
                static_cast<float>((a.cx + dist[2]) * s),
                static_cast<float>((a.cy + dist[3]) * s)};
        for (int c = 0; c < num_classes; ++c) {
          const float score =
              static_cast<float>(sigmoid_scalar(m.at(0, 4 * kRegMax + c, y, x)));
          if (score > conf_threshold) out.push_back({box, c, score});
        }
      }
  return out;
}

inline double iou(const Box& a, const Box& b) {
  const double iw = std::min(static_cast<double>(a.x2), static_cast<double>(b.x2)) -
                    std::max(static_cast<double>(a.x1), static_cast<double>(b.x1));
  const double ih = std::min(static_cast<double>(a.y2), static_cast<double>(b.y2)) -
                    std::max(static_cast<double>(a.y1), static_cast<double>(b.y1));
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (static_cast<double>(a.x2) - a.x1) * (static_cast<double>(a.y2) - a.y1);
  const double area_b = (static_cast<double>(b.x2) - b.x1) * (static_cast<double>(b.y2) - b.y1);
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

// Class-aware greedy suppression. Candidates are visited in score-descending
// order (ties: lower class_id first, then input order); one is kept iff its
// IoU with every already-kept detection of the same class is <= threshold.
// The kept list is returned in visit order, so scores descend.
inline std::vector<Detection> nms(const std::vector<Detection>& candidates,
                                  double iou_threshold) {
  if (iou_threshold < 0.0 || iou_threshold > 1.0)
    throw std::invalid_argument("nms: threshold must be in [0,1]");
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (candidates[i].score != candidates[j].score)
      return candidates[i].score > candidates[j].score;
    return candidates[i].class_id < candidates[j].class_id;
  });

  std::vector<Detection> kept;
  for (std::size_t idx : order) {
    const Detection& d = candidates[idx];
    bool keep = true;
    for (const Detection& k : kept) {
      if (k.class_id != d.class_id) continue;
      if (iou(k.box, d.box) > iou_threshold) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(d);
  }
  return kept;
}

inline Box clip_to_image(const Box& b, int img_w, int img_h) {
  const float w = static_cast<float>(img_w), h = static_cast<float>(img_h);
  Box out{std::clamp(b.x1, 0.0f, w), std::clamp(b.y1, 0.0f, h),
          std::clamp(b.x2, 0.0f, w), std::clamp(b.y2, 0.0f, h)};
  if (out.x2 < out.x1) out.x2 = out.x1;
  if (out.y2 < out.y1) out.y2 = out.y1;
  return out;
}

}  // namespace ymu
