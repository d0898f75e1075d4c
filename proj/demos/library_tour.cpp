// A compact tour of the library API: model accounting, a forward pass on a
// synthetic image, box decoding, losses, augmentation, and evaluation.

#include <array>
#include <cstdio>
#include <vector>

#include "ymu/augment.hpp"
#include "ymu/detect.hpp"
#include "ymu/eval.hpp"
#include "ymu/forward.hpp"
#include "ymu/image.hpp"
#include "ymu/losses.hpp"
#include "ymu/model.hpp"
#include "ymu/weights.hpp"

int main() {
  // Model accounting: the 25-row graph, parameter totals, FLOPs estimate.
  const ymu::ModelGraph g = ymu::build_yolov5mu(4);
  const ymu::ParamTable params = ymu::param_count(g);
  std::printf("model: %zu layers, %lld parameters, %.2f GFLOPs at 640\n",
              g.layers.size(), params.total, ymu::estimate_flops(g, 640, 640));

  const auto maps_hw = ymu::detect_output_shapes(g, 640, 640);
  std::printf("detect maps at 640: %dx%d %dx%d %dx%d\n", maps_hw[0][1], maps_hw[0][2],
              maps_hw[1][1], maps_hw[1][2], maps_hw[2][1], maps_hw[2][2]);

  // Forward pass on a small synthetic image with random weights.
  const int size = 64;
  const ymu::WeightStore store = ymu::init_weights(g, 1);
  ymu::Rng64 rng(2);
  ymu::Tensor input(1, 3, size, size);
  for (float& v : input.data()) v = static_cast<float>(rng.uniform(0.0, 1.0));
  const std::array<ymu::Tensor, 3> maps = ymu::forward(g, store, input);

  std::vector<std::array<int, 2>> level_hw;
  for (const ymu::Tensor& m : maps) level_hw.push_back({m.h(), m.w()});
  auto dets = ymu::decode_predictions(
      maps, ymu::make_anchor_points(level_hw, g.strides), 0.25);
  for (ymu::Detection& d : dets) d.box = ymu::clip_to_image(d.box, size, size);
  dets = ymu::nms(dets, 0.45);
  std::printf("random-weight inference at %d: %zu detections\n", size, dets.size());
  for (const auto& d : dets)
    std::printf("  class %d score %.3f box [%.1f %.1f %.1f %.1f]\n", d.class_id,
                d.score, d.box.x1, d.box.y1, d.box.x2, d.box.y2);

  // Losses carry analytic gradients.
  const ymu::Box pred{0.5f, 0.5f, 1.5f, 1.5f};
  const ymu::Box gt{0.0f, 0.0f, 2.0f, 2.0f};
  const auto ciou = ymu::ciou_loss(pred, gt);
  std::printf("ciou(concentric quarter-area) = %.4f, d/dx1 = %.4f\n", ciou.loss,
              ciou.grad[0]);
  std::printf("bce(z=0, y=1) = %.4f\n", ymu::bce_with_logits(0.0, 1.0).loss);

  // Augmentation draws per-sample parameters from (seed, index).
  ymu::ImageBuffer img(48, 32);
  for (auto& b : img.pixels()) b = static_cast<std::uint8_t>(rng.bounded(256));
  ymu::AugmentConfig cfg;
  cfg.target_size = 64;
  cfg.master_seed = 5;
  const auto sample =
      ymu::augment_sample(img, {{0, 0.5, 0.5, 0.4, 0.4}}, cfg, 0);
  const auto drawn = ymu::draw_augment_params(cfg, 0);
  std::printf("augment sample 0: gray=%d hue=%.3f sat=%.3f bright=%.3f -> %dx%d\n",
              drawn.grayscale ? 1 : 0, drawn.hue_offset, drawn.sat_scale,
              drawn.bright_scale, sample.image.width(), sample.image.height());

  // Evaluation: a perfect detection and a false positive.
  const std::vector<ymu::GroundTruth> gts = {{"a", 0, {0, 0, 10, 10}}};
  const std::vector<ymu::EvalDetection> eval_dets = {
      {"a", 0, 0.9, {40, 40, 50, 50}}, {"a", 0, 0.8, {0, 0, 10, 10}}};
  const ymu::EvalSummary summary = ymu::evaluate(eval_dets, gts, 1);
  std::printf("eval fixture: map50 %.3f precision %.3f recall %.3f\n", summary.map50,
              summary.precision, summary.recall);
  return 0;
}
