#include "catch2/catch_amalgamated.hpp"

#include <cstdio>
#include <string>
#include <vector>

#include "ymu/common.hpp"
#include "ymu/image.hpp"

using ymu::ImageBuffer;
using ymu::Rng64;

namespace {

ImageBuffer random_image(int w, int h, Rng64& rng) {
  ImageBuffer img(w, h);
  for (auto& b : img.pixels()) b = static_cast<std::uint8_t>(rng.bounded(256));
  return img;
}

ImageBuffer solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  ImageBuffer img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = r;
      img.at(x, y, 1) = g;
      img.at(x, y, 2) = b;
    }
  return img;
}

int max_channel_diff(const ImageBuffer& a, const ImageBuffer& b) {
  REQUIRE(a.width() == b.width());
  REQUIRE(a.height() == b.height());
  int worst = 0;
  for (std::size_t i = 0; i < a.pixels().size(); ++i)
    worst = std::max(worst, std::abs(int(a.pixels()[i]) - int(b.pixels()[i])));
  return worst;
}

}  // namespace

TEST_CASE("ImageBuffer layout and validation") {
  ImageBuffer img(3, 2);
  REQUIRE(img.pixels().size() == 18);
  img.at(2, 1, 1) = 200;
  REQUIRE(img.pixels()[(1 * 3 + 2) * 3 + 1] == 200);
  REQUIRE_THROWS_AS(ImageBuffer(0, 5), std::invalid_argument);
}

TEST_CASE("ppm encode/decode round trip is bit exact") {
  Rng64 rng(1);
  const ImageBuffer img = random_image(17, 9, rng);
  const auto bytes = ymu::encode_ppm(img);
  const std::string header(bytes.begin(), bytes.begin() + 10);
  REQUIRE(header == "P6\n17 9\n25");
  REQUIRE(ymu::decode_ppm(bytes) == img);
}

TEST_CASE("ppm decoder accepts comments and whitespace variants") {
  const std::string header = "P6 # comment\n# another comment\n 2\t1 \n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  const std::uint8_t px[6] = {1, 2, 3, 250, 251, 252};
  bytes.insert(bytes.end(), px, px + 6);
  const ImageBuffer img = ymu::decode_ppm(bytes);
  REQUIRE(img.width() == 2);
  REQUIRE(img.height() == 1);
  REQUIRE(img.at(1, 0, 2) == 252);
}

TEST_CASE("ppm decoder rejects malformed input") {
  Rng64 rng(2);
  const auto good = ymu::encode_ppm(random_image(4, 4, rng));

  auto bad_magic = good;
  bad_magic[1] = '5';
  REQUIRE_THROWS_AS(ymu::decode_ppm(bad_magic), ymu::InputError);

  auto truncated = good;
  truncated.resize(truncated.size() - 1);
  REQUIRE_THROWS_AS(ymu::decode_ppm(truncated), ymu::InputError);

  auto trailing = good;
  trailing.push_back(0);
  REQUIRE_THROWS_AS(ymu::decode_ppm(trailing), ymu::InputError);

  const std::string wrong_max = "P6\n1 1\n254\nabc";
  REQUIRE_THROWS_AS(
      ymu::decode_ppm(std::vector<std::uint8_t>(wrong_max.begin(), wrong_max.end())),
      ymu::InputError);
}

TEST_CASE("ppm file io round trips") {
  Rng64 rng(3);
  const ImageBuffer img = random_image(5, 7, rng);
  const std::string path = "test_image_io.ppm";
  ymu::write_ppm(path, img);
  REQUIRE(ymu::read_ppm(path) == img);
  std::remove(path.c_str());
  REQUIRE_THROWS_AS(ymu::read_ppm("no_such_file.ppm"), ymu::InputError);
}

TEST_CASE("rgb_to_hsv hits the standard anchors") {
  const auto red = ymu::rgb_to_hsv(255, 0, 0);
  REQUIRE(red.h == 0.0);
  REQUIRE(red.s == 1.0);
  REQUIRE(red.v == 1.0);

  const auto green = ymu::rgb_to_hsv(0, 255, 0);
  REQUIRE(green.h == Catch::Approx(120.0));
  const auto blue = ymu::rgb_to_hsv(0, 0, 255);
  REQUIRE(blue.h == Catch::Approx(240.0));

  const auto gray = ymu::rgb_to_hsv(128, 128, 128);
  REQUIRE(gray.h == 0.0);
  REQUIRE(gray.s == 0.0);
  REQUIRE(gray.v == Catch::Approx(128.0 / 255.0));
}

TEST_CASE("hsv round trip is exact on grays and within 1 elsewhere") {
  for (int g = 0; g < 256; ++g) {
    const auto hsv = ymu::rgb_to_hsv(g, g, g);
    std::uint8_t r, gg, b;
    ymu::hsv_to_rgb(hsv, r, gg, b);
    REQUIRE(int(r) == g);
    REQUIRE(int(gg) == g);
    REQUIRE(int(b) == g);
  }

  Rng64 rng(4);
  int worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto r0 = static_cast<std::uint8_t>(rng.bounded(256));
    const auto g0 = static_cast<std::uint8_t>(rng.bounded(256));
    const auto b0 = static_cast<std::uint8_t>(rng.bounded(256));
    std::uint8_t r1, g1, b1;
    ymu::hsv_to_rgb(ymu::rgb_to_hsv(r0, g0, b0), r1, g1, b1);
    worst = std::max({worst, std::abs(int(r1) - int(r0)), std::abs(int(g1) - int(g0)),
                      std::abs(int(b1) - int(b0))});
  }
  REQUIRE(worst <= 1);
}

TEST_CASE("hsv_to_rgb guards the wheel edges") {
  std::uint8_t r, g, b;
  ymu::hsv_to_rgb({360.0, 1.0, 1.0}, r, g, b);
  REQUIRE(int(r) == 255);
  REQUIRE(int(g) == 0);
  REQUIRE(int(b) == 0);
  ymu::hsv_to_rgb({0.0, 0.0, 0.5}, r, g, b);
  REQUIRE(r == g);
  REQUIRE(g == b);
}

TEST_CASE("resize_bilinear keeps constant images constant") {
  const ImageBuffer img = solid(2560, 1920, 17, 201, 96);
  const ImageBuffer out = ymu::resize_bilinear(img, 640, 640);
  REQUIRE(out.width() == 640);
  REQUIRE(out.height() == 640);
  for (int y = 0; y < 640; y += 97)
    for (int x = 0; x < 640; x += 89) {
      REQUIRE(out.at(x, y, 0) == 17);
      REQUIRE(out.at(x, y, 1) == 201);
      REQUIRE(out.at(x, y, 2) == 96);
    }
}

TEST_CASE("resize_bilinear averages the 2x2 checker to 128") {
  ImageBuffer img(2, 2);
  for (int c = 0; c < 3; ++c) {
    img.at(0, 0, c) = 0;
    img.at(1, 0, c) = 255;
    img.at(0, 1, c) = 255;
    img.at(1, 1, c) = 0;
  }
  const ImageBuffer out = ymu::resize_bilinear(img, 1, 1);
  // The center sample averages to 127.5 and rounds half-to-even.
  REQUIRE(int(out.at(0, 0, 0)) == 128);
}

TEST_CASE("resize_bilinear at 1:1 is the identity") {
  Rng64 rng(5);
  const ImageBuffer img = random_image(13, 8, rng);
  REQUIRE(ymu::resize_bilinear(img, 13, 8) == img);
}

TEST_CASE("resize_bilinear validates output dims") {
  const ImageBuffer img = solid(2, 2, 0, 0, 0);
  REQUIRE_THROWS_AS(ymu::resize_bilinear(img, 0, 4), std::invalid_argument);
}

TEST_CASE("resize_letterbox pads symmetrically with the fill value") {
  const ImageBuffer img = solid(100, 50, 10, 20, 30);
  const ImageBuffer out = ymu::resize_letterbox(img, 100, 100, 114);
  REQUIRE(out.at(0, 0, 0) == 114);
  REQUIRE(out.at(50, 10, 0) == 114);
  REQUIRE(out.at(50, 95, 2) == 114);
  REQUIRE(out.at(50, 50, 0) == 10);
  REQUIRE(out.at(50, 50, 1) == 20);
  REQUIRE(out.at(50, 50, 2) == 30);
}

TEST_CASE("to_grayscale uses Rec.601 luma") {
  const ImageBuffer red = solid(2, 2, 255, 0, 0);
  REQUIRE(int(ymu::to_grayscale(red).at(0, 0, 0)) == 76);
  REQUIRE(int(ymu::to_grayscale(solid(1, 1, 0, 255, 0)).at(0, 0, 0)) == 150);
  REQUIRE(int(ymu::to_grayscale(solid(1, 1, 0, 0, 255)).at(0, 0, 0)) == 29);

  Rng64 rng(6);
  const ImageBuffer img = random_image(9, 5, rng);
  const ImageBuffer gray = ymu::to_grayscale(img);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 9; ++x) {
      REQUIRE(gray.at(x, y, 0) == gray.at(x, y, 1));
      REQUIRE(gray.at(x, y, 1) == gray.at(x, y, 2));
    }
  REQUIRE(ymu::to_grayscale(gray) == gray);
}

TEST_CASE("adjust_hue rotates red by a tenth of the wheel to orange") {
  const ImageBuffer red = solid(3, 3, 255, 0, 0);
  const ImageBuffer out = ymu::adjust_hue(red, 0.10);
  REQUIRE(int(out.at(1, 1, 0)) == 255);
  REQUIRE(int(out.at(1, 1, 1)) == 153);
  REQUIRE(int(out.at(1, 1, 2)) == 0);
}

TEST_CASE("adjust_hue leaves achromatic pixels alone") {
  const ImageBuffer gray = solid(4, 4, 77, 77, 77);
  REQUIRE(ymu::adjust_hue(gray, 0.10) == gray);
}

TEST_CASE("adjust_hue composes with its inverse within rounding") {
  Rng64 rng(7);
  const ImageBuffer img = random_image(12, 12, rng);
  const ImageBuffer round = ymu::adjust_hue(ymu::adjust_hue(img, 0.10), -0.10);
  REQUIRE(max_channel_diff(round, img) <= 1);
}

TEST_CASE("adjust_saturation scales the saturation channel") {
  const ImageBuffer red = solid(2, 2, 255, 0, 0);
  REQUIRE(ymu::adjust_saturation(red, 1.25) == red);

  const ImageBuffer dull = solid(1, 1, 128, 64, 64);
  const ImageBuffer out = ymu::adjust_saturation(dull, 0.75);
  const auto hsv = ymu::rgb_to_hsv(out.at(0, 0, 0), out.at(0, 0, 1), out.at(0, 0, 2));
  REQUIRE(hsv.h == 0.0);
  REQUIRE(hsv.s == Catch::Approx(0.375).margin(0.01));
  REQUIRE(int(out.at(0, 0, 0)) == 128);

  Rng64 rng(8);
  const ImageBuffer img = random_image(10, 10, rng);
  REQUIRE(max_channel_diff(ymu::adjust_saturation(img, 1.0), img) <= 1);
  REQUIRE_THROWS_AS(ymu::adjust_saturation(img, -0.5), std::invalid_argument);
}

TEST_CASE("adjust_brightness scales the value channel") {
  const ImageBuffer g100 = solid(2, 2, 100, 100, 100);
  const ImageBuffer out = ymu::adjust_brightness(g100, 1.05);
  REQUIRE(int(out.at(0, 0, 0)) == 105);
  REQUIRE(int(out.at(1, 1, 2)) == 105);

  const ImageBuffer white = solid(2, 2, 255, 255, 255);
  REQUIRE(ymu::adjust_brightness(white, 1.05) == white);

  Rng64 rng(9);
  const ImageBuffer img = random_image(10, 10, rng);
  REQUIRE(max_channel_diff(ymu::adjust_brightness(img, 1.0), img) <= 1);
}
