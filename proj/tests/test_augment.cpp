#include "catch2/catch_amalgamated.hpp"

#include <vector>

#include "ymu/augment.hpp"
#include "ymu/common.hpp"

using ymu::Annotation;
using ymu::AugmentConfig;
using ymu::ImageBuffer;
using ymu::Rng64;

namespace {

ImageBuffer random_image(int w, int h, std::uint64_t seed) {
  Rng64 rng(seed);
  ImageBuffer img(w, h);
  for (auto& b : img.pixels()) b = static_cast<std::uint8_t>(rng.bounded(256));
  return img;
}

bool achromatic(const ImageBuffer& img) {
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (img.at(x, y, 0) != img.at(x, y, 1) || img.at(x, y, 1) != img.at(x, y, 2))
        return false;
  return true;
}

}  // namespace

TEST_CASE("augment_sample is deterministic in (seed, index)") {
  const ImageBuffer img = random_image(31, 17, 42);
  const std::vector<Annotation> boxes = {{0, 0.5, 0.5, 0.25, 0.1}, {2, 0.1, 0.9, 0.05, 0.05}};
  AugmentConfig cfg;
  cfg.target_size = 32;
  cfg.master_seed = 99;

  const auto a = ymu::augment_sample(img, boxes, cfg, 7);
  const auto b = ymu::augment_sample(img, boxes, cfg, 7);
  REQUIRE(a.image == b.image);
  REQUIRE(a.boxes.size() == boxes.size());
  REQUIRE(a.boxes[1].cy == boxes[1].cy);

  // Computing other samples in between must not disturb the stream.
  (void)ymu::augment_sample(img, boxes, cfg, 3);
  const auto c = ymu::augment_sample(img, boxes, cfg, 7);
  REQUIRE(c.image == a.image);

  bool any_difference = false;
  for (std::uint64_t idx = 0; idx < 8 && !any_difference; ++idx)
    any_difference = !(ymu::augment_sample(img, boxes, cfg, idx).image == a.image);
  REQUIRE(any_difference);
}

TEST_CASE("degenerate config reduces to the resize alone") {
  const ImageBuffer img = random_image(50, 40, 5);
  AugmentConfig cfg;
  cfg.target_size = 36;
  cfg.gray_probability = 0.0;
  cfg.hue_limit = 0.0;
  cfg.sat_limit = 0.0;
  cfg.bright_limit = 0.0;
  const auto out = ymu::augment_sample(img, {}, cfg, 0);
  REQUIRE(out.image == ymu::resize_bilinear(img, 36, 36));
}

TEST_CASE("grayscale fires at the configured frequency") {
  AugmentConfig cfg;
  cfg.master_seed = 2024;
  int count = 0;
  for (std::uint64_t i = 0; i < 10000; ++i)
    if (ymu::draw_augment_params(cfg, i).grayscale) ++count;
  // 15% of 10,000 with a 1% absolute tolerance (about 3 sigma).
  REQUIRE(count >= 1400);
  REQUIRE(count <= 1600);
}

TEST_CASE("drawn parameters respect the configured limits") {
  AugmentConfig cfg;
  cfg.master_seed = 7;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto p = ymu::draw_augment_params(cfg, i);
    REQUIRE(p.hue_offset >= -0.10);
    REQUIRE(p.hue_offset <= 0.10);
    REQUIRE(p.sat_scale >= 0.75);
    REQUIRE(p.sat_scale <= 1.25);
    REQUIRE(p.bright_scale >= 0.95);
    REQUIRE(p.bright_scale <= 1.05);
  }
}

TEST_CASE("grayscale draw matches achromatic output") {
  // A saturated input stays chromatic unless the grayscale branch ran: the
  // saturation scale never drops below 0.75.
  ImageBuffer img(2, 2);
  img.at(0, 0, 0) = 255;
  img.at(1, 1, 1) = 200;
  AugmentConfig cfg;
  cfg.target_size = 2;
  cfg.master_seed = 31337;
  for (std::uint64_t i = 0; i < 300; ++i) {
    const bool gray = ymu::draw_augment_params(cfg, i).grayscale;
    const auto out = ymu::augment_sample(img, {}, cfg, i);
    REQUIRE(achromatic(out.image) == gray);
  }
}

TEST_CASE("boxes pass through untouched") {
  const ImageBuffer img = random_image(20, 10, 1);
  const std::vector<Annotation> boxes = {{3, 0.25, 0.75, 0.5, 0.5}};
  AugmentConfig cfg;
  cfg.target_size = 16;
  const auto out = ymu::augment_sample(img, boxes, cfg, 11);
  REQUIRE(out.boxes.size() == 1);
  REQUIRE(out.boxes[0].class_id == 3);
  REQUIRE(out.boxes[0].cx == 0.25);
  REQUIRE(out.boxes[0].cy == 0.75);
  REQUIRE(out.boxes[0].w == 0.5);
  REQUIRE(out.boxes[0].h == 0.5);
}

TEST_CASE("letterbox mode pads and remaps boxes") {
  // 2:1 image into a square: content scales to 640x320 and sits 160px down.
  ImageBuffer img(100, 50);
  for (int y = 0; y < 50; ++y)
    for (int x = 0; x < 100; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = 200;
  AugmentConfig cfg;
  cfg.gray_probability = 0.0;
  cfg.hue_limit = 0.0;
  cfg.sat_limit = 0.0;
  cfg.bright_limit = 0.0;
  cfg.letterbox = true;
  const std::vector<Annotation> boxes = {{1, 0.5, 0.5, 0.4, 0.8}};
  const auto out = ymu::augment_sample(img, boxes, cfg, 0);

  REQUIRE(out.image.width() == 640);
  REQUIRE(out.image.height() == 640);
  REQUIRE(out.image.at(320, 10, 0) == 114);   // pad band
  REQUIRE(out.image.at(320, 320, 0) == 200);  // content band

  REQUIRE(out.boxes.size() == 1);
  REQUIRE(out.boxes[0].cx == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(out.boxes[0].cy == Catch::Approx(0.5 * 0.5 + 0.25).margin(1e-12));
  REQUIRE(out.boxes[0].w == Catch::Approx(0.4).margin(1e-12));
  REQUIRE(out.boxes[0].h == Catch::Approx(0.8 * 0.5).margin(1e-12));
}

TEST_CASE("augment_sample rejects unnormalized boxes") {
  const ImageBuffer img = random_image(8, 8, 2);
  AugmentConfig cfg;
  cfg.target_size = 8;
  REQUIRE_THROWS_AS(ymu::augment_sample(img, {{0, 1.2, 0.5, 0.1, 0.1}}, cfg, 0),
                    ymu::InputError);
  REQUIRE_THROWS_AS(ymu::augment_sample(img, {{0, 0.5, 0.5, -0.1, 0.1}}, cfg, 0),
                    ymu::InputError);
}

TEST_CASE("augment_sample validates its config") {
  const ImageBuffer img = random_image(8, 8, 3);
  AugmentConfig cfg;
  cfg.gray_probability = 1.5;
  REQUIRE_THROWS_AS(ymu::augment_sample(img, {}, cfg, 0), std::invalid_argument);
  cfg = {};
  cfg.hue_limit = -0.1;
  REQUIRE_THROWS_AS(ymu::augment_sample(img, {}, cfg, 0), std::invalid_argument);
  cfg = {};
  cfg.sat_limit = 1.5;
  REQUIRE_THROWS_AS(ymu::augment_sample(img, {}, cfg, 0), std::invalid_argument);
  cfg = {};
  cfg.target_size = 0;
  REQUIRE_THROWS_AS(ymu::augment_sample(img, {}, cfg, 0), std::invalid_argument);
}

TEST_CASE("output size follows target_size") {
  const ImageBuffer img = random_image(33, 21, 4);
  AugmentConfig cfg;
  cfg.target_size = 640;
  const auto out = ymu::augment_sample(img, {}, cfg, 0);
  REQUIRE(out.image.width() == 640);
  REQUIRE(out.image.height() == 640);
}
