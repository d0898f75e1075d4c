#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymu/common.hpp"
#include "ymu/detect.hpp"

namespace ymu {

// One detection attributed to a named image.
struct EvalDetection {
  std::string image;
  int class_id = 0;
  double score = 0;
  Box box;
};

struct GroundTruth {
  std::string image;
  int class_id = 0;
  Box box;
};

struct MatchedDetection {
  double score = 0;
  int class_id = 0;
  bool is_tp = false;
};

// Detections in global (score descending, input order) sequence with their
// TP/FP verdicts, plus the per-class ground-truth counts.
struct MatchResult {
  std::vector<MatchedDetection> detections;
  std::vector<long long> gt_counts;
};

namespace detail {

inline void validate_eval_inputs(std::span<const EvalDetection> dets,
                                 std::span<const GroundTruth> gts, int num_classes) {
  if (num_classes < 1) throw std::invalid_argument("eval: num_classes must be >= 1");
  for (const EvalDetection& d : dets)
    if (d.class_id < 0 || d.class_id >= num_classes)
      throw std::invalid_argument("eval: detection class id out of range");
  for (const GroundTruth& g : gts)
    if (g.class_id < 0 || g.class_id >= num_classes)
      throw std::invalid_argument("eval: ground truth class id out of range");
}

// Score-descending visit order; equal scores keep input order.
inline std::vector<std::size_t> score_order(std::span<const EvalDetection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score;
  });
  return order;
}

}  // namespace detail

// Greedy one-to-one matching, per image and class: visiting detections by
// descending score, each takes the unmatched ground truth with the highest
// IoU when that IoU reaches the threshold. IoU ties pick the earlier ground
// truth in input order.
inline MatchResult match_detections(std::span<const EvalDetection> dets,
                                    std::span<const GroundTruth> gts,
                                    double iou_threshold, int num_classes) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw std::invalid_argument("match_detections: threshold must be in (0,1]");
  detail::validate_eval_inputs(dets, gts, num_classes);

  MatchResult out;
  out.gt_counts.assign(static_cast<std::size_t>(num_classes), 0);
  for (const GroundTruth& g : gts) ++out.gt_counts[static_cast<std::size_t>(g.class_id)];

  std::vector<char> used(gts.size(), 0);
  out.detections.reserve(dets.size());
  for (std::size_t idx : detail::score_order(dets)) {
    const EvalDetection& d = dets[idx];
    double best = 0.0;
    std::ptrdiff_t best_gt = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].class_id != d.class_id || gts[g].image != d.image) continue;
      const double ov = iou(d.box, gts[g].box);
      if (ov > best) {
        best = ov;
        best_gt = static_cast<std::ptrdiff_t>(g);
      }
    }
    const bool tp = best_gt >= 0 && best >= iou_threshold;
    if (tp) used[static_cast<std::size_t>(best_gt)] = 1;
    out.detections.push_back({d.score, d.class_id, tp});
  }
  return out;
}

struct PrPoint {
  double recall = 0;
  double precision = 0;
};

struct PRCurve {
  std::vector<PrPoint> points;  // one per detection, cumulative, score order
  long long gt_count = 0;
};

inline PRCurve pr_curve(const MatchResult& match, int class_id) {
  if (class_id < 0 || class_id >= static_cast<int>(match.gt_counts.size()))
    throw std::invalid_argument("pr_curve: class id out of range");
  PRCurve curve;
  curve.gt_count = match.gt_counts[static_cast<std::size_t>(class_id)];
  long long tp = 0, fp = 0;
  for (const MatchedDetection& d : match.detections) {
    if (d.class_id != class_id) continue;
    if (d.is_tp)
      ++tp;
    else
      ++fp;
    PrPoint pt;
    pt.recall = curve.gt_count > 0
                    ? static_cast<double>(tp) / static_cast<double>(curve.gt_count)
                    : 0.0;
    pt.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    curve.points.push_back(pt);
  }
  return curve;
}

// 101-point interpolated AP: the mean over r in {0, 0.01, ..., 1.00} of the
// highest precision among points with recall >= r, summed in ascending r
// order. A class with no ground truth scores 0 when detections exist and 1
// when there are none.
inline double average_precision(const PRCurve& curve) {
  if (curve.gt_count == 0) return curve.points.empty() ? 1.0 : 0.0;
  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    double best = 0.0;
    for (const PrPoint& pt : curve.points)
      if (pt.recall >= r) best = std::max(best, pt.precision);
    sum += best;
  }
  return sum / 101.0;
}

// Square (num_classes+1)^2 count table: row = predicted class, column =
// actual class, with the extra index standing for background.
struct ConfusionMatrix {
  int num_classes = 0;
  std::vector<long long> counts;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int nc)
      : num_classes(nc),
        counts(static_cast<std::size_t>(nc + 1) * static_cast<std::size_t>(nc + 1), 0) {}

  long long& at(int pred, int actual) {
    return counts[static_cast<std::size_t>(pred) * (num_classes + 1) + actual];
  }
  long long at(int pred, int actual) const {
    return counts[static_cast<std::size_t>(pred) * (num_classes + 1) + actual];
  }
  int background() const { return num_classes; }

  bool operator==(const ConfusionMatrix&) const = default;
};

// Pairs detections above the confidence cutoff with ground truth by IoU
// alone, ignoring class. Unmatched detections land in the background column,
// unmatched ground truths in the background row.
inline ConfusionMatrix confusion_matrix(std::span<const EvalDetection> dets,
                                        std::span<const GroundTruth> gts,
                                        double iou_threshold, double conf_threshold,
                                        int num_classes) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw std::invalid_argument("confusion_matrix: iou threshold must be in (0,1]");
  if (!(conf_threshold >= 0.0 && conf_threshold <= 1.0))
    throw std::invalid_argument("confusion_matrix: conf threshold must be in [0,1]");
  detail::validate_eval_inputs(dets, gts, num_classes);

  ConfusionMatrix m(num_classes);
  std::vector<char> used(gts.size(), 0);
  for (std::size_t idx : detail::score_order(dets)) {
    const EvalDetection& d = dets[idx];
    if (!(d.score > conf_threshold)) continue;
    double best = 0.0;
    std::ptrdiff_t best_gt = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].image != d.image) continue;
      const double ov = iou(d.box, gts[g].box);
      if (ov > best) {
        best = ov;
        best_gt = static_cast<std::ptrdiff_t>(g);
      }
    }
    if (best_gt >= 0 && best >= iou_threshold) {
      used[static_cast<std::size_t>(best_gt)] = 1;
      ++m.at(d.class_id, gts[static_cast<std::size_t>(best_gt)].class_id);
    } else {
      ++m.at(d.class_id, m.background());
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (!used[g]) ++m.at(m.background(), gts[g].class_id);
  return m;
}

struct EvalSummary {
  bool has_ground_truth = false;
  std::vector<double> ap50;      // per class; zero-gt classes carry the AP convention value
  std::vector<double> ap50_95;
  std::vector<long long> gt_counts;
  double map50 = 0;
  double map50_95 = 0;
  double precision = 0;  // at the max-F1 point of the merged IoU-0.50 curve
  double recall = 0;
  ConfusionMatrix confusion;
};

inline constexpr double kConfusionIouThreshold = 0.50;
inline constexpr double kConfusionConfThreshold = 0.25;

// Full evaluation: per-class AP at IoU 0.50 and averaged over the ten
// thresholds (50+5i)/100, mAPs over classes that have ground truth, and the
// precision/recall pair at the confidence maximizing F1 on the merged
// all-class curve. The confusion matrix uses IoU 0.50 and confidence 0.25.
inline EvalSummary evaluate(std::span<const EvalDetection> dets,
                            std::span<const GroundTruth> gts, int num_classes) {
  detail::validate_eval_inputs(dets, gts, num_classes);

  EvalSummary out;
  out.ap50.assign(static_cast<std::size_t>(num_classes), 0.0);
  out.ap50_95.assign(static_cast<std::size_t>(num_classes), 0.0);
  out.confusion = confusion_matrix(dets, gts, kConfusionIouThreshold,
                                   kConfusionConfThreshold, num_classes);

  MatchResult match50;
  for (int i = 0; i < 10; ++i) {
    const double threshold = (50 + 5 * i) / 100.0;
    const MatchResult match = match_detections(dets, gts, threshold, num_classes);
    if (i == 0) match50 = match;
    for (int c = 0; c < num_classes; ++c) {
      const double ap = average_precision(pr_curve(match, c));
      if (i == 0) out.ap50[static_cast<std::size_t>(c)] = ap;
      out.ap50_95[static_cast<std::size_t>(c)] += ap;
    }
  }
  for (int c = 0; c < num_classes; ++c) out.ap50_95[static_cast<std::size_t>(c)] /= 10.0;
  out.gt_counts = match50.gt_counts;

  int classes_with_gt = 0;
  for (int c = 0; c < num_classes; ++c) {
    if (out.gt_counts[static_cast<std::size_t>(c)] == 0) continue;
    ++classes_with_gt;
    out.map50 += out.ap50[static_cast<std::size_t>(c)];
    out.map50_95 += out.ap50_95[static_cast<std::size_t>(c)];
  }
  if (classes_with_gt == 0) {
    out.has_ground_truth = false;
    out.map50 = 0;
    out.map50_95 = 0;
    return out;
  }
  out.has_ground_truth = true;
  out.map50 /= classes_with_gt;
  out.map50_95 /= classes_with_gt;

  // Merged curve over every class at IoU 0.50.
  const long long total_gt = static_cast<long long>(gts.size());
  long long tp = 0, fp = 0;
  double best_f1 = -1.0;
  for (const MatchedDetection& d : match50.detections) {
    if (d.is_tp)
      ++tp;
    else
      ++fp;
    const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double r = static_cast<double>(tp) / static_cast<double>(total_gt);
    const double f1 = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    if (f1 > best_f1) {
      best_f1 = f1;
      out.precision = p;
      out.recall = r;
    }
  }
  return out;
}

}  // namespace ymu
