#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ymu/common.hpp"
#include "ymu/dataset.hpp"
#include "ymu/image.hpp"

namespace ymu {

struct AugmentConfig {
  int target_size = 640;
  double gray_probability = 0.15;
  double hue_limit = 0.10;     // fraction of the full hue wheel
  double sat_limit = 0.25;     // multiplicative: scale in [1-limit, 1+limit]
  double bright_limit = 0.05;  // multiplicative: scale in [1-limit, 1+limit]
  bool letterbox = false;      // aspect-preserving resize instead of the stretch
  std::uint64_t master_seed = 0;
};

inline void validate_config(const AugmentConfig& cfg) {
  if (cfg.target_size < 1)
    throw std::invalid_argument("augment: target_size must be positive");
  if (!(cfg.gray_probability >= 0.0 && cfg.gray_probability <= 1.0))
    throw std::invalid_argument("augment: gray_probability must be in [0,1]");
  if (cfg.hue_limit < 0.0 || cfg.sat_limit < 0.0 || cfg.bright_limit < 0.0)
    throw std::invalid_argument("augment: limits must be non-negative");
  if (cfg.sat_limit > 1.0 || cfg.bright_limit > 1.0)
    throw std::invalid_argument("augment: sat/bright limits above 1 give negative scales");
}

// The jitter drawn for one sample. Every field is always drawn, in a fixed
// order, so the stream layout does not depend on earlier outcomes.
struct AugmentParams {
  bool grayscale = false;
  double hue_offset = 0;
  double sat_scale = 1;
  double bright_scale = 1;
};

inline AugmentParams draw_augment_params(const AugmentConfig& cfg,
                                         std::uint64_t sample_index) {
  validate_config(cfg);
  Rng64 rng = Rng64::for_sample(cfg.master_seed, sample_index);
  AugmentParams p;
  p.grayscale = rng.next_double() < cfg.gray_probability;
  p.hue_offset = rng.uniform(-cfg.hue_limit, cfg.hue_limit);
  p.sat_scale = rng.uniform(1.0 - cfg.sat_limit, 1.0 + cfg.sat_limit);
  p.bright_scale = rng.uniform(1.0 - cfg.bright_limit, 1.0 + cfg.bright_limit);
  return p;
}

struct AugmentedSample {
  ImageBuffer image;
  std::vector<Annotation> boxes;
};

// Full per-sample pipeline: stretch-resize to the square target, then
// grayscale with the configured probability, then hue/saturation/brightness
// jitter. A pure function of (image, boxes, config, sample_index).
// Identity-valued parameters skip their HSV pass, so a all-zero-limit config
// reduces to the resize alone. Normalized boxes pass through unchanged: the
// resize is a full-frame stretch and the color ops move no geometry.
inline AugmentedSample augment_sample(const ImageBuffer& img,
                                      const std::vector<Annotation>& boxes,
                                      const AugmentConfig& cfg,
                                      std::uint64_t sample_index) {
  for (const Annotation& a : boxes) {
    const double vals[4] = {a.cx, a.cy, a.w, a.h};
    for (double v : vals)
      if (!(v >= 0.0 && v <= 1.0))
        throw InputError("augment: box coordinates must be normalized to [0,1]");
  }
  const AugmentParams p = draw_augment_params(cfg, sample_index);

  AugmentedSample out;
  out.boxes = boxes;
  if (cfg.letterbox) {
    out.image = resize_letterbox(img, cfg.target_size, cfg.target_size);
    // The stretch keeps normalized boxes invariant; letterboxing does not, so
    // remap them with the same scale/offset arithmetic resize_letterbox uses.
    const double scale = std::min(double(cfg.target_size) / img.width(),
                                  double(cfg.target_size) / img.height());
    const int new_w = std::max(1, int(std::lround(img.width() * scale)));
    const int new_h = std::max(1, int(std::lround(img.height() * scale)));
    const int off_x = (cfg.target_size - new_w) / 2;
    const int off_y = (cfg.target_size - new_h) / 2;
    for (Annotation& a : out.boxes) {
      a.cx = (a.cx * new_w + off_x) / cfg.target_size;
      a.cy = (a.cy * new_h + off_y) / cfg.target_size;
      a.w = a.w * new_w / cfg.target_size;
      a.h = a.h * new_h / cfg.target_size;
    }
  } else {
    out.image = resize_bilinear(img, cfg.target_size, cfg.target_size);
  }
  if (p.grayscale) out.image = to_grayscale(out.image);
  if (p.hue_offset != 0.0) out.image = adjust_hue(out.image, p.hue_offset);
  if (p.sat_scale != 1.0) out.image = adjust_saturation(out.image, p.sat_scale);
  if (p.bright_scale != 1.0) out.image = adjust_brightness(out.image, p.bright_scale);
  return out;
}

}  // namespace ymu
