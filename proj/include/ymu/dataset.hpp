#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ymu/common.hpp"

namespace ymu {

// Ordered class names; the index in the list is the class id.
struct ClassMap {
  std::vector<std::string> names;
  int size() const { return static_cast<int>(names.size()); }
};

inline ClassMap default_class_map() {
  return {{"Laptop", "Occupant State - Abnormal", "Occupant State - Sitting",
           "Occupant State - Walking"}};
}

// One name per line, index = line number.
inline ClassMap parse_class_file(const std::string& text) {
  ClassMap map;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string name = text.substr(start, end - start);
    if (!name.empty() && name.back() == '\r') name.pop_back();
    const bool last = end == text.size();
    ++line_no;
    if (name.empty()) {
      if (!last)
        throw InputError("class file line " + std::to_string(line_no) + ": empty name");
    } else {
      if (std::find(map.names.begin(), map.names.end(), name) != map.names.end())
        throw InputError("class file line " + std::to_string(line_no) +
                         ": duplicate name \"" + name + "\"");
      map.names.push_back(std::move(name));
    }
    if (last) break;
    start = end + 1;
  }
  return map;
}

inline std::string write_class_file(const ClassMap& map) {
  std::string out;
  for (const std::string& name : map.names) {
    out += name;
    out += '\n';
  }
  return out;
}

// One normalized annotation: box center + extent, all in [0,1].
struct Annotation {
  int class_id = 0;
  double cx = 0, cy = 0, w = 0, h = 0;
};

namespace detail {

inline bool parse_double_token(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

inline bool parse_int_token(std::string_view token, int& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// Values up to kSlack outside [0,1] are pulled back in; anything further out
// is the caller's error.
inline constexpr double kSlack = 1e-3;

inline bool clamp_unit(double& v) {
  if (v < -kSlack || v > 1.0 + kSlack) return false;
  v = std::clamp(v, 0.0, 1.0);
  return true;
}

}  // namespace detail

// Parses YOLO-format labels: one "class cx cy w h" line per annotation, all
// coordinates normalized. Values marginally outside [0,1] (annotation tools
// routinely emit epsilon overflows) are clamped and reported via `warnings`.
inline std::vector<Annotation> parse_label_file(const std::string& text, int num_classes,
                                                std::vector<std::string>* warnings = nullptr) {
  if (num_classes < 1) throw std::invalid_argument("parse_label_file: num_classes < 1");
  std::vector<Annotation> out;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + start, end - start);
    ++line_no;
    const auto fields = detail::split_ws(line);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (!fields.empty()) {
      if (fields.size() != 5)
        throw InputError(where + "expected 5 fields, got " +
                         std::to_string(fields.size()));
      Annotation a;
      if (!detail::parse_int_token(fields[0], a.class_id))
        throw InputError(where + "class id is not an integer");
      if (a.class_id < 0 || a.class_id >= num_classes)
        throw InputError(where + "class id " + std::to_string(a.class_id) +
                         " out of range [0," + std::to_string(num_classes - 1) + "]");
      double* vals[4] = {&a.cx, &a.cy, &a.w, &a.h};
      const char* names[4] = {"cx", "cy", "w", "h"};
      for (int i = 0; i < 4; ++i) {
        if (!detail::parse_double_token(fields[i + 1], *vals[i]))
          throw InputError(where + std::string(names[i]) + " is not a number");
        const double raw = *vals[i];
        if (!detail::clamp_unit(*vals[i]))
          throw InputError(where + std::string(names[i]) + " out of range [0,1]");
        if (raw != *vals[i] && warnings)
          warnings->push_back(where + std::string(names[i]) + " clamped to [0,1]");
      }
      // Box edges may also poke out by an epsilon; pull them back and keep
      // the center/extent form consistent.
      double x1 = a.cx - a.w / 2, x2 = a.cx + a.w / 2;
      double y1 = a.cy - a.h / 2, y2 = a.cy + a.h / 2;
      const double worst = std::max({-x1, -y1, x2 - 1.0, y2 - 1.0, 0.0});
      if (worst > detail::kSlack)
        throw InputError(where + "box extends outside the image");
      if (worst > 0.0) {
        x1 = std::clamp(x1, 0.0, 1.0);
        x2 = std::clamp(x2, 0.0, 1.0);
        y1 = std::clamp(y1, 0.0, 1.0);
        y2 = std::clamp(y2, 0.0, 1.0);
        a.cx = (x1 + x2) / 2;
        a.cy = (y1 + y2) / 2;
        a.w = x2 - x1;
        a.h = y2 - y1;
        if (warnings) warnings->push_back(where + "box clamped to the image");
      }
      out.push_back(a);
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

inline std::string write_label_file(std::span<const Annotation> annotations) {
  std::string out;
  char buf[128];
  for (const Annotation& a : annotations) {
    std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f\n", a.class_id, a.cx, a.cy,
                  a.w, a.h);
    out += buf;
  }
  return out;
}

inline Box norm_to_pixel(const Annotation& a, int img_w, int img_h) {
  if (img_w < 1 || img_h < 1)
    throw std::invalid_argument("norm_to_pixel: image dims must be positive");
  return {static_cast<float>((a.cx - a.w / 2) * img_w),
          static_cast<float>((a.cy - a.h / 2) * img_h),
          static_cast<float>((a.cx + a.w / 2) * img_w),
          static_cast<float>((a.cy + a.h / 2) * img_h)};
}

inline Annotation pixel_to_norm(const Box& box, int img_w, int img_h, int class_id = 0) {
  if (img_w < 1 || img_h < 1)
    throw std::invalid_argument("pixel_to_norm: image dims must be positive");
  Annotation a;
  a.class_id = class_id;
  a.cx = (static_cast<double>(box.x1) + box.x2) / 2.0 / img_w;
  a.cy = (static_cast<double>(box.y1) + box.y2) / 2.0 / img_h;
  a.w = (static_cast<double>(box.x2) - box.x1) / img_w;
  a.h = (static_cast<double>(box.y2) - box.y1) / img_h;
  return a;
}

// Deterministic shuffle, then the first round(ratio*N) items form the
// training part. Both parts keep the shuffled order.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_dataset(std::vector<T> items,
                                                        double ratio,
                                                        std::uint64_t seed) {
  if (items.empty()) throw std::invalid_argument("split_dataset: empty input");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("split_dataset: ratio must be in (0,1)");
  Rng64 rng(seed);
  for (std::size_t i = items.size() - 1; i > 0; --i) {
    const std::size_t j = rng.bounded(i + 1);
    std::swap(items[i], items[j]);
  }
  std::size_t n_train = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(items.size())));
  n_train = std::min(n_train, items.size());
  std::vector<T> train(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<T> val(items.begin() + static_cast<std::ptrdiff_t>(n_train), items.end());
  return {std::move(train), std::move(val)};
}

// Manifest: image path and label path, tab-separated, one pair per line.
struct ManifestEntry {
  std::string image_path;
  std::string label_path;
  bool operator==(const ManifestEntry&) const = default;
};

inline std::vector<ManifestEntry> parse_manifest(const std::string& text) {
  std::vector<ManifestEntry> out;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    if (!line.empty()) {
      const std::size_t tab = line.find('\t');
      if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
        throw InputError("manifest line " + std::to_string(line_no) +
                         ": expected image<TAB>label");
      out.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

inline std::string write_manifest(std::span<const ManifestEntry> entries) {
  std::string out;
  for (const ManifestEntry& e : entries) {
    out += e.image_path;
    out += '\t';
    out += e.label_path;
    out += '\n';
  }
  return out;
}

}  // namespace ymu
