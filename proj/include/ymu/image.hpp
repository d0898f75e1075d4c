#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ymu/common.hpp"

namespace ymu {

// 8-bit RGB image, row-major, three interleaved channels per pixel.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height)
      : width_(width), height_(height),
        pixels_(static_cast<std::size_t>(width) * height * 3, 0) {
    if (width < 1 || height < 1)
      throw std::invalid_argument("ImageBuffer: dimensions must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  std::vector<std::uint8_t>& pixels() { return pixels_; }

  std::uint8_t at(int x, int y, int c) const {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }
  std::uint8_t& at(int x, int y, int c) {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }

  bool operator==(const ImageBuffer& o) const {
    return width_ == o.width_ && height_ == o.height_ && pixels_ == o.pixels_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

namespace detail {

// Reads the next PPM header token, skipping whitespace and # comments.
inline std::string ppm_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = static_cast<char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < bytes.size()) {
    const char c = static_cast<char>(bytes[pos]);
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') break;
    token.push_back(c);
    ++pos;
  }
  return token;
}

inline int ppm_int(std::span<const std::uint8_t> bytes, std::size_t& pos,
                   const char* what) {
  const std::string token = ppm_token(bytes, pos);
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
    throw InputError(std::string("ppm: bad ") + what);
  long v = 0;
  for (char c : token) {
    v = v * 10 + (c - '0');
    if (v > 1 << 20) throw InputError(std::string("ppm: ") + what + " out of range");
  }
  return static_cast<int>(v);
}

}  // namespace detail

inline ImageBuffer decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  if (detail::ppm_token(bytes, pos) != "P6") throw InputError("ppm: not a P6 file");
  const int w = detail::ppm_int(bytes, pos, "width");
  const int h = detail::ppm_int(bytes, pos, "height");
  const int maxval = detail::ppm_int(bytes, pos, "maxval");
  if (w < 1 || h < 1) throw InputError("ppm: dimensions must be positive");
  if (maxval != 255) throw InputError("ppm: only maxval 255 is supported");
  if (pos >= bytes.size()) throw InputError("ppm: truncated header");
  const char sep = static_cast<char>(bytes[pos]);
  if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n')
    throw InputError("ppm: missing separator after maxval");
  ++pos;

  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() - pos < need) throw InputError("ppm: truncated pixel data");
  if (bytes.size() - pos > need) throw InputError("ppm: trailing bytes after pixel data");
  ImageBuffer img(w, h);
  std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end(),
            img.pixels().begin());
  return img;
}

inline std::vector<std::uint8_t> encode_ppm(const ImageBuffer& img) {
  const std::string header = "P6\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

inline ImageBuffer read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open");
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  try {
    return decode_ppm(bytes);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline void write_ppm(const std::string& path, const ImageBuffer& img) {
  const std::vector<std::uint8_t> bytes = encode_ppm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError(path + ": write failed");
}

struct Hsv {
  double h = 0;  // degrees in [0, 360)
  double s = 0;  // [0, 1]
  double v = 0;  // [0, 1]
};

// Hexcone conversion. Achromatic pixels get hue 0.
inline Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double rd = r / 255.0, gd = g / 255.0, bd = b / 255.0;
  const double mx = std::max({rd, gd, bd});
  const double mn = std::min({rd, gd, bd});
  const double d = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? d / mx : 0.0;
  if (d > 0.0) {
    if (mx == rd)
      out.h = 60.0 * ((gd - bd) / d);
    else if (mx == gd)
      out.h = 60.0 * ((bd - rd) / d + 2.0);
    else
      out.h = 60.0 * ((rd - gd) / d + 4.0);
    if (out.h < 0.0) out.h += 360.0;
    if (out.h >= 360.0) out.h = 0.0;
  }
  return out;
}

namespace detail {

inline std::uint8_t to_byte(double unit) {
  const double scaled = round_half_even(unit * 255.0);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

}  // namespace detail

inline void hsv_to_rgb(const Hsv& hsv, std::uint8_t& r, std::uint8_t& g,
                       std::uint8_t& b) {
  const double s = std::clamp(hsv.s, 0.0, 1.0);
  const double v = std::clamp(hsv.v, 0.0, 1.0);
  if (s <= 0.0) {
    r = g = b = detail::to_byte(v);
    return;
  }
  double hh = hsv.h;
  if (hh >= 360.0 || hh < 0.0) hh = 0.0;
  hh /= 60.0;
  int sector = static_cast<int>(hh);
  if (sector > 5) sector = 5;
  const double f = hh - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  double rd, gd, bd;
  switch (sector) {
    case 0: rd = v; gd = t; bd = p; break;
    case 1: rd = q; gd = v; bd = p; break;
    case 2: rd = p; gd = v; bd = t; break;
    case 3: rd = p; gd = q; bd = v; break;
    case 4: rd = t; gd = p; bd = v; break;
    default: rd = v; gd = p; bd = q; break;
  }
  r = detail::to_byte(rd);
  g = detail::to_byte(gd);
  b = detail::to_byte(bd);
}

// Half-pixel-center bilinear resampling; interpolation in double, stored with
// round-half-even.
inline ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1)
    throw std::invalid_argument("resize_bilinear: output dims must be positive");
  ImageBuffer out(out_w, out_h);
  const double sx = static_cast<double>(img.width()) / out_w;
  const double sy = static_cast<double>(img.height()) / out_h;
  for (int y = 0; y < out_h; ++y) {
    const double src_y = (y + 0.5) * sy - 0.5;
    const int y0 = static_cast<int>(std::floor(src_y));
    const double fy = src_y - y0;
    const int y0c = std::clamp(y0, 0, img.height() - 1);
    const int y1c = std::clamp(y0 + 1, 0, img.height() - 1);
    for (int x = 0; x < out_w; ++x) {
      const double src_x = (x + 0.5) * sx - 0.5;
      const int x0 = static_cast<int>(std::floor(src_x));
      const double fx = src_x - x0;
      const int x0c = std::clamp(x0, 0, img.width() - 1);
      const int x1c = std::clamp(x0 + 1, 0, img.width() - 1);
      for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - fx) * img.at(x0c, y0c, c) + fx * img.at(x1c, y0c, c);
        const double bot = (1.0 - fx) * img.at(x0c, y1c, c) + fx * img.at(x1c, y1c, c);
        const double val = round_half_even((1.0 - fy) * top + fy * bot);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(val, 0.0, 255.0));
      }
    }
  }
  return out;
}

// Aspect-preserving alternative: scales to fit and centers on a constant
// background.
inline ImageBuffer resize_letterbox(const ImageBuffer& img, int out_w, int out_h,
                                    std::uint8_t pad = 114) {
  if (out_w < 1 || out_h < 1)
    throw std::invalid_argument("resize_letterbox: output dims must be positive");
  const double scale =
      std::min(static_cast<double>(out_w) / img.width(),
               static_cast<double>(out_h) / img.height());
  const int new_w = std::max(1, static_cast<int>(std::round(img.width() * scale)));
  const int new_h = std::max(1, static_cast<int>(std::round(img.height() * scale)));
  const ImageBuffer scaled = resize_bilinear(img, new_w, new_h);
  ImageBuffer out(out_w, out_h);
  std::fill(out.pixels().begin(), out.pixels().end(), pad);
  const int off_x = (out_w - new_w) / 2;
  const int off_y = (out_h - new_h) / 2;
  for (int y = 0; y < new_h; ++y)
    for (int x = 0; x < new_w; ++x)
      for (int c = 0; c < 3; ++c) out.at(off_x + x, off_y + y, c) = scaled.at(x, y, c);
  return out;
}

// Rec.601 luma replicated across the three channels.
inline ImageBuffer to_grayscale(const ImageBuffer& img) {
  ImageBuffer out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double luma =
          0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
      const auto b = static_cast<std::uint8_t>(
          std::clamp(round_half_even(luma), 0.0, 255.0));
      out.at(x, y, 0) = b;
      out.at(x, y, 1) = b;
      out.at(x, y, 2) = b;
    }
  return out;
}

namespace detail {

template <typename F>
ImageBuffer map_hsv(const ImageBuffer& img, F f) {
  ImageBuffer out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      Hsv hsv = rgb_to_hsv(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      f(hsv);
      hsv_to_rgb(hsv, out.at(x, y, 0), out.at(x, y, 1), out.at(x, y, 2));
    }
  return out;
}

}  // namespace detail

// Rotates hue by a fraction of the full wheel; saturation and value are kept.
inline ImageBuffer adjust_hue(const ImageBuffer& img, double offset_fraction) {
  return detail::map_hsv(img, [offset_fraction](Hsv& hsv) {
    double h = std::fmod(hsv.h + offset_fraction * 360.0, 360.0);
    if (h < 0.0) h += 360.0;
    hsv.h = h;
  });
}

inline ImageBuffer adjust_saturation(const ImageBuffer& img, double scale) {
  if (scale < 0.0) throw std::invalid_argument("adjust_saturation: negative scale");
  return detail::map_hsv(
      img, [scale](Hsv& hsv) { hsv.s = std::clamp(hsv.s * scale, 0.0, 1.0); });
}

inline ImageBuffer adjust_brightness(const ImageBuffer& img, double scale) {
  if (scale < 0.0) throw std::invalid_argument("adjust_brightness: negative scale");
  return detail::map_hsv(
      img, [scale](Hsv& hsv) { hsv.v = std::clamp(hsv.v * scale, 0.0, 1.0); });
}

}  // namespace ymu
