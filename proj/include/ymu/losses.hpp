#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ymu/detect.hpp"
#include "ymu/tensor.hpp"

namespace ymu {

struct BceResult {
  double loss = 0;
  double grad = 0;  // d loss / d logit
};

// Numerically stable binary cross-entropy on a logit:
// loss = max(z,0) - z*y + log(1 + exp(-|z|)), gradient sigmoid(z) - y.
inline BceResult bce_with_logits(double logit, double target) {
  if (!(target >= 0.0 && target <= 1.0))
    throw std::invalid_argument("bce_with_logits: target must be in [0,1]");
  const double z = logit;
  const double loss = std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z)));
  return {loss, sigmoid_scalar(z) - target};
}

struct CIoUTerms {
  double iou = 0;
  double center_dist_sq = 0;    // squared center distance
  double enclosing_diag_sq = 0; // squared diagonal of the enclosing box
  double aspect_term = 0;       // v
  double tradeoff = 0;          // alpha
};

struct CIoUResult {
  double loss = 0;
  std::array<double, 4> grad{};  // d loss / d (x1, y1, x2, y2) of pred
  CIoUTerms terms;
};

// loss = 1 - IoU + rho^2/c^2 + alpha*v with
//   v = (4/pi^2) (atan(w_gt/h_gt) - atan(w/h))^2,  alpha = v/((1-IoU)+v).
// alpha is held constant during differentiation.
inline CIoUResult ciou_loss(const Box& pred, const Box& gt) {
  const double px1 = pred.x1, py1 = pred.y1, px2 = pred.x2, py2 = pred.y2;
  const double gx1 = gt.x1, gy1 = gt.y1, gx2 = gt.x2, gy2 = gt.y2;
  const double pw = px2 - px1, ph = py2 - py1;
  const double gw = gx2 - gx1, gh = gy2 - gy1;
  if (pw <= 0.0 || ph <= 0.0 || gw <= 0.0 || gh <= 0.0)
    throw std::invalid_argument("ciou_loss: boxes must have positive area");

  // IoU and its derivative pieces
  const double iw = std::min(px2, gx2) - std::max(px1, gx1);
  const double ih = std::min(py2, gy2) - std::max(py1, gy1);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double area_p = pw * ph, area_g = gw * gh;
  const double uni = area_p + area_g - inter;
  const double iou = inter / uni;

  // d inter / d pred corner (zero when disjoint or corner not binding)
  double dI[4] = {0, 0, 0, 0};
  if (inter > 0.0) {
    dI[0] = (px1 > gx1) ? -ih : 0.0;
    dI[1] = (py1 > gy1) ? -iw : 0.0;
    dI[2] = (px2 < gx2) ? ih : 0.0;
    dI[3] = (py2 < gy2) ? iw : 0.0;
  }
  const double dAp[4] = {-ph, -pw, ph, pw};
  double diou[4];
  for (int k = 0; k < 4; ++k) {
    const double dU = dAp[k] - dI[k];
    diou[k] = (dI[k] * uni - inter * dU) / (uni * uni);
  }

  // center distance over enclosing diagonal
  const double dcx = (px1 + px2 - gx1 - gx2) / 2.0;
  const double dcy = (py1 + py2 - gy1 - gy2) / 2.0;
  const double rho2 = dcx * dcx + dcy * dcy;
  const double cw = std::max(px2, gx2) - std::min(px1, gx1);
  const double ch = std::max(py2, gy2) - std::min(py1, gy1);
  const double c2 = cw * cw + ch * ch;

  const double drho2[4] = {dcx, dcy, dcx, dcy};
  double dc2[4] = {0, 0, 0, 0};
  if (px1 < gx1) dc2[0] = -2.0 * cw;
  if (py1 < gy1) dc2[1] = -2.0 * ch;
  if (px2 > gx2) dc2[2] = 2.0 * cw;
  if (py2 > gy2) dc2[3] = 2.0 * ch;

  // aspect penalty
  constexpr double k4pi2 = 4.0 / (3.14159265358979323846 * 3.14159265358979323846);
  const double gap = std::atan(gw / gh) - std::atan(pw / ph);
  const double v = k4pi2 * gap * gap;
  const double denom = (1.0 - iou) + v;
  const double alpha = denom > 0.0 ? v / denom : 0.0;

  const double rp = pw / ph;
  const double dv_drp = -2.0 * k4pi2 * gap / (1.0 + rp * rp);
  const double drp[4] = {-1.0 / ph, pw / (ph * ph), 1.0 / ph, -pw / (ph * ph)};

  CIoUResult out;
  out.terms = {iou, rho2, c2, v, alpha};
  out.loss = 1.0 - iou + rho2 / c2 + alpha * v;
  for (int k = 0; k < 4; ++k)
    out.grad[k] = -diou[k] + (drho2[k] * c2 - rho2 * dc2[k]) / (c2 * c2) +
                  alpha * dv_drp * drp[k];
  return out;
}

struct DflResult {
  double loss = 0;
  std::array<double, 16> grad{};  // d loss / d logit
};

// Cross-entropy against the two bins adjacent to the continuous target:
// with i = floor(t), loss = -((i+1-t) log S_i + (t-i) log S_{i+1});
// an integer target reduces to the single-bin term.
inline DflResult dfl_loss(std::span<const float> bin_logits, double target) {
  if (bin_logits.size() != kRegMax)
    throw std::invalid_argument("dfl_loss: expected 16 bin logits");
  if (!(target >= 0.0 && target <= 15.0))
    throw std::invalid_argument("dfl_loss: target must be in [0,15]");

  double mx = bin_logits[0];
  for (float v : bin_logits) mx = std::max(mx, static_cast<double>(v));
  double sum = 0.0;
  for (float v : bin_logits) sum += std::exp(static_cast<double>(v) - mx);
  std::array<double, 16> soft{};
  for (int i = 0; i < kRegMax; ++i)
    soft[i] = std::exp(static_cast<double>(bin_logits[i]) - mx) / sum;

  const int lo = static_cast<int>(std::floor(target));
  std::array<double, 16> weight{};
  if (static_cast<double>(lo) == target) {
    weight[lo] = 1.0;
  } else {
    weight[lo] = lo + 1 - target;
    weight[lo + 1] = target - lo;
  }

  DflResult out;
  for (int i = 0; i < kRegMax; ++i) {
    if (weight[i] > 0.0) out.loss -= weight[i] * std::log(soft[i]);
    out.grad[i] = soft[i] - weight[i];
  }
  return out;
}

struct LossWeights {
  double box = 7.5;
  double cls = 0.5;
  double dfl = 1.5;
};

// One grid cell's raw prediction, paired with its anchor. The decoded box is
// in input-image pixels.
struct CellPrediction {
  AnchorPoint anchor;
  std::array<std::array<float, 16>, 4> bin_logits{};  // left, top, right, bottom
  std::vector<float> class_logits;
  Box box;
};

// Expands raw maps into per-cell predictions in the same enumeration order
// as decode_predictions (levels in order, cells row-major).
inline std::vector<CellPrediction> flatten_predictions(
    std::span<const Tensor> maps, const std::vector<AnchorPoint>& anchors) {
  std::size_t cells = 0;
  for (const Tensor& m : maps) {
    if (m.c() < 4 * kRegMax + 1)
      throw std::invalid_argument("flatten: map channels must be 64 + num_classes");
    cells += static_cast<std::size_t>(m.h()) * m.w();
  }
  if (cells != anchors.size())
    throw std::invalid_argument("flatten: anchor count does not match map cells");

  std::vector<CellPrediction> out;
  out.reserve(cells);
  std::size_t cell = 0;
  for (const Tensor& m : maps) {
    const int nc = m.c() - 4 * kRegMax;
    for (int y = 0; y < m.h(); ++y)
      for (int x = 0; x < m.w(); ++x, ++cell) {
        CellPrediction p;
        p.anchor = anchors[cell];
        for (int side = 0; side < 4; ++side)
          for (int b = 0; b < kRegMax; ++b)
            p.bin_logits[side][b] = m.at(0, side * kRegMax + b, y, x);
        p.class_logits.resize(nc);
        for (int c = 0; c < nc; ++c) p.class_logits[c] = m.at(0, 4 * kRegMax + c, y, x);
        double dist[4];
        for (int side = 0; side < 4; ++side) dist[side] = dfl_expectation(p.bin_logits[side]);
        const double s = p.anchor.stride;
        p.box = {static_cast<float>((p.anchor.cx - dist[0]) * s),
                 static_cast<float>((p.anchor.cy - dist[1]) * s),
                 static_cast<float>((p.anchor.cx + dist[2]) * s),
                 static_cast<float>((p.anchor.cy + dist[3]) * s)};
        out.push_back(std::move(p));
      }
  }
  return out;
}

struct Assignment {
  std::size_t prediction_index = 0;
  Box gt_box;  // pixels
  int gt_class = 0;
};

struct DetectionLossResult {
  double total = 0;
  double box = 0;
  double cls = 0;
  double dfl = 0;
};

// Combined loss over an explicit assignment. Box part: mean CIoU over
// assigned pairs. Dfl part: mean over the four sides of every assigned pair,
// targets being anchor-to-gt-edge distances in grid units clamped to
// [0, 14.99]. Cls part: mean BCE over every (cell, class) logit with one-hot
// targets. Total: weighted sum of the three means.
inline DetectionLossResult detection_loss(const std::vector<CellPrediction>& preds,
                                          const std::vector<Assignment>& assignments,
                                          int num_classes, const LossWeights& weights) {
  if (num_classes < 1)
    throw std::invalid_argument("detection_loss: num_classes must be >= 1");
  for (const Assignment& a : assignments) {
    if (a.prediction_index >= preds.size())
      throw std::invalid_argument("detection_loss: assignment index out of range");
    if (a.gt_class < 0 || a.gt_class >= num_classes)
      throw std::invalid_argument("detection_loss: assignment class out of range");
  }

  DetectionLossResult out;
  if (!assignments.empty()) {
    double box_sum = 0.0, dfl_sum = 0.0;
    for (const Assignment& a : assignments) {
      const CellPrediction& p = preds[a.prediction_index];
      box_sum += ciou_loss(p.box, a.gt_box).loss;
      const double s = p.anchor.stride;
      const double dist[4] = {p.anchor.cx - a.gt_box.x1 / s, p.anchor.cy - a.gt_box.y1 / s,
                              a.gt_box.x2 / s - p.anchor.cx, a.gt_box.y2 / s - p.anchor.cy};
      for (int side = 0; side < 4; ++side) {
        const double target = std::clamp(dist[side], 0.0, 15.0 - 0.01);
        dfl_sum += dfl_loss(p.bin_logits[side], target).loss;
      }
    }
    out.box = box_sum / static_cast<double>(assignments.size());
    out.dfl = dfl_sum / static_cast<double>(4 * assignments.size());
  }

  if (!preds.empty()) {
    double cls_sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (static_cast<int>(preds[i].class_logits.size()) != num_classes)
        throw std::invalid_argument("detection_loss: class logit width mismatch");
      for (int c = 0; c < num_classes; ++c) {
        double target = 0.0;
        for (const Assignment& a : assignments)
          if (a.prediction_index == i && a.gt_class == c) target = 1.0;
        cls_sum += bce_with_logits(preds[i].class_logits[c], target).loss;
      }
    }
    out.cls = cls_sum / static_cast<double>(preds.size() * num_classes);
  }

  out.total = weights.box * out.box + weights.cls * out.cls + weights.dfl * out.dfl;
  return out;
}

struct GtBox {
  Box box;  // pixels
  int class_id = 0;
};

// Size-based single-cell assignment: a gt goes to the level whose stride
// covers max(w, h) (< 64 px: stride 8, < 128 px: stride 16, else stride 32),
// into the cell containing its center. Prediction indices follow the
// make_anchor_points / flatten_predictions enumeration.
inline std::vector<Assignment> assign_targets_center(
    const std::vector<GtBox>& gts, const std::vector<std::array<int, 2>>& level_hw,
    std::span<const int> strides, int img_w, int img_h) {
  if (level_hw.size() != strides.size())
    throw std::invalid_argument("assign_targets_center: one shape per stride required");
  std::vector<std::size_t> offsets(level_hw.size());
  std::size_t running = 0;
  for (std::size_t i = 0; i < level_hw.size(); ++i) {
    offsets[i] = running;
    running += static_cast<std::size_t>(level_hw[i][0]) * level_hw[i][1];
  }

  std::vector<Assignment> out;
  for (const GtBox& gt : gts) {
    const double w = static_cast<double>(gt.box.x2) - gt.box.x1;
    const double h = static_cast<double>(gt.box.y2) - gt.box.y1;
    const double cx = (static_cast<double>(gt.box.x1) + gt.box.x2) / 2.0;
    const double cy = (static_cast<double>(gt.box.y1) + gt.box.y2) / 2.0;
    if (cx < 0.0 || cx >= img_w || cy < 0.0 || cy >= img_h)
      throw std::invalid_argument("assign_targets_center: gt center outside image");

    const double size = std::max(w, h);
    std::size_t level = 0;
    if (size >= 128.0)
      level = 2;
    else if (size >= 64.0)
      level = 1;
    if (level >= level_hw.size()) level = level_hw.size() - 1;

    const int stride = strides[level];
    const int grid_h = level_hw[level][0], grid_w = level_hw[level][1];
    int cell_x = static_cast<int>(std::floor(cx / stride));
    int cell_y = static_cast<int>(std::floor(cy / stride));
    cell_x = std::clamp(cell_x, 0, grid_w - 1);
    cell_y = std::clamp(cell_y, 0, grid_h - 1);
    out.push_back({offsets[level] + static_cast<std::size_t>(cell_y) * grid_w + cell_x,
                   gt.box, gt.class_id});
  }
  return out;
}

}  // namespace ymu
