#pragma once

#include <algorithm>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "ymu/common.hpp"

namespace ymu {

// Fixed plot geometry: 640x480 canvas, data area spanning x in [60,600] and
// y in [20,440] with y growing downward in SVG space.
inline constexpr int kPlotWidth = 640;
inline constexpr int kPlotHeight = 480;
inline constexpr double kPlotLeft = 60.0;
inline constexpr double kPlotRight = 600.0;
inline constexpr double kPlotTop = 20.0;
inline constexpr double kPlotBottom = 440.0;

struct PlotSeries {
  std::string label;
  std::vector<double> xs, ys;
};

struct PlotBounds {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
};

// Exact data envelope: min/max over every point of every series.
inline PlotBounds data_bounds(std::span<const PlotSeries> series) {
  bool any = false;
  PlotBounds b;
  for (const PlotSeries& s : series) {
    if (s.xs.size() != s.ys.size())
      throw std::invalid_argument("data_bounds: xs/ys length mismatch");
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!any) {
        b = {s.xs[i], s.xs[i], s.ys[i], s.ys[i]};
        any = true;
      } else {
        b.x_min = std::min(b.x_min, s.xs[i]);
        b.x_max = std::max(b.x_max, s.xs[i]);
        b.y_min = std::min(b.y_min, s.ys[i]);
        b.y_max = std::max(b.y_max, s.ys[i]);
      }
    }
  }
  if (!any) throw std::invalid_argument("data_bounds: no data points");
  return b;
}

namespace detail {

inline std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string fmt4g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Degenerate ranges collapse to the plot-area midpoint.
inline double map_x(double x, const PlotBounds& b) {
  const double span = b.x_max - b.x_min;
  if (span <= 0.0) return (kPlotLeft + kPlotRight) / 2.0;
  return kPlotLeft + (x - b.x_min) / span * (kPlotRight - kPlotLeft);
}

inline double map_y(double y, const PlotBounds& b) {
  const double span = b.y_max - b.y_min;
  if (span <= 0.0) return (kPlotTop + kPlotBottom) / 2.0;
  return kPlotBottom - (y - b.y_min) / span * (kPlotBottom - kPlotTop);
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* series_color(std::size_t i) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
  return kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
}

}  // namespace detail

// Self-contained SVG line plot. Coordinates are written with two decimals;
// axis extremes are labeled with %.4g.
inline std::string render_line_plot(const std::string& title, const std::string& x_label,
                                    const std::string& y_label,
                                    std::span<const PlotSeries> series,
                                    const PlotBounds& bounds) {
  using detail::fmt2;
  using detail::fmt4g;
  using detail::xml_escape;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(kPlotWidth) + "\" height=\"" + std::to_string(kPlotHeight) +
         "\" viewBox=\"0 0 " + std::to_string(kPlotWidth) + " " +
         std::to_string(kPlotHeight) + "\">\n";
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "  <text x=\"320\" y=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" + xml_escape(title) + "</text>\n";

  // Axes.
  svg += "  <line x1=\"" + fmt2(kPlotLeft) + "\" y1=\"" + fmt2(kPlotBottom) + "\" x2=\"" +
         fmt2(kPlotRight) + "\" y2=\"" + fmt2(kPlotBottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "  <line x1=\"" + fmt2(kPlotLeft) + "\" y1=\"" + fmt2(kPlotTop) + "\" x2=\"" +
         fmt2(kPlotLeft) + "\" y2=\"" + fmt2(kPlotBottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // Extreme tick labels.
  svg += "  <text x=\"" + fmt2(kPlotLeft) + "\" y=\"456\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"11\">" + fmt4g(bounds.x_min) + "</text>\n";
  svg += "  <text x=\"" + fmt2(kPlotRight) + "\" y=\"456\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"11\">" + fmt4g(bounds.x_max) + "</text>\n";
  svg += "  <text x=\"" + fmt2(kPlotLeft - 6) + "\" y=\"" + fmt2(kPlotBottom) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         fmt4g(bounds.y_min) + "</text>\n";
  svg += "  <text x=\"" + fmt2(kPlotLeft - 6) + "\" y=\"" + fmt2(kPlotTop + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         fmt4g(bounds.y_max) + "</text>\n";

  // Axis titles.
  svg += "  <text x=\"330\" y=\"474\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">" + xml_escape(x_label) + "</text>\n";
  svg += "  <text x=\"14\" y=\"230\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 14 230)\">" + xml_escape(y_label) +
         "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const PlotSeries& s = series[i];
    if (s.xs.size() != s.ys.size())
      throw std::invalid_argument("render_line_plot: xs/ys length mismatch");
    std::string points;
    for (std::size_t k = 0; k < s.xs.size(); ++k) {
      if (k) points += ' ';
      points += fmt2(detail::map_x(s.xs[k], bounds)) + "," +
                fmt2(detail::map_y(s.ys[k], bounds));
    }
    svg += "  <polyline fill=\"none\" stroke=\"";
    svg += detail::series_color(i);
    svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    if (s.xs.size() == 1) {
      // A single sample would be invisible as a line; mark it.
      svg += "  <circle cx=\"" + fmt2(detail::map_x(s.xs[0], bounds)) + "\" cy=\"" +
             fmt2(detail::map_y(s.ys[0], bounds)) + "\" r=\"3\" fill=\"";
      svg += detail::series_color(i);
      svg += "\"/>\n";
    }
    svg += "  <text x=\"" + fmt2(kPlotRight - 4) + "\" y=\"" +
           fmt2(kPlotTop + 14 + 14 * static_cast<double>(i)) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"";
    svg += detail::series_color(i);
    svg += "\">" + xml_escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

// Minimal CSV with double-quote escaping. Parsing preserves field strings
// exactly; writing quotes only when a field contains a comma, quote, or
// newline.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(row);
    row.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        continue;
      }
      field += c;
      ++i;
      continue;
    }
    if (c == '"' && !field_started && field.empty()) {
      quoted = true;
      field_started = true;
      ++i;
      continue;
    }
    if (c == ',') {
      end_field();
      ++i;
      continue;
    }
    if (c == '\n') {
      if (!field.empty() || field_started || !row.empty()) end_row();
      ++i;
      continue;
    }
    if (c == '\r') {
      ++i;
      continue;
    }
    field += c;
    field_started = true;
    ++i;
  }
  if (quoted) throw InputError("csv: unterminated quoted field");
  if (!field.empty() || field_started || !row.empty()) end_row();
  return rows;
}

inline std::string write_csv(std::span<const std::vector<std::string>> rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const std::string& f = row[i];
      if (f.find_first_of(",\"\n\r") != std::string::npos) {
        out += '"';
        for (char c : f) {
          if (c == '"') out += '"';
          out += c;
        }
        out += '"';
      } else {
        out += f;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace ymu
