#include "catch2/catch_amalgamated.hpp"

#include <string>
#include <vector>

#include "ymu/common.hpp"
#include "ymu/report.hpp"

using ymu::PlotBounds;
using ymu::PlotSeries;

TEST_CASE("plot maps the unit square corners to the plot-area corners") {
  const PlotBounds unit{0, 1, 0, 1};
  PlotSeries s;
  s.label = "pr";
  s.xs = {0.0, 1.0};
  s.ys = {0.0, 1.0};
  const std::string svg =
      ymu::render_line_plot("t", "recall", "precision", std::vector{s}, unit);
  REQUIRE(svg.find("60.00,440.00") != std::string::npos);
  REQUIRE(svg.find("600.00,20.00") != std::string::npos);
}

TEST_CASE("a single perfect PR point renders at the top-right corner") {
  PlotSeries s;
  s.label = "class 0";
  s.xs = {1.0};
  s.ys = {1.0};
  const std::string svg = ymu::render_line_plot("PR", "recall", "precision",
                                                std::vector{s}, PlotBounds{0, 1, 0, 1});
  REQUIRE(svg.find("points=\"600.00,20.00\"") != std::string::npos);
  REQUIRE(svg.find("<circle cx=\"600.00\" cy=\"20.00\"") != std::string::npos);
}

TEST_CASE("svg output is a self-contained document") {
  PlotSeries a;
  a.label = "box";
  a.xs = {0, 1, 2};
  a.ys = {3.0, 2.0, 1.5};
  PlotSeries b;
  b.label = "cls";
  b.xs = {0, 1, 2};
  b.ys = {1.0, 0.8, 0.9};
  const std::vector<PlotSeries> series = {a, b};
  const std::string svg = ymu::render_line_plot("losses", "step", "loss", series,
                                                ymu::data_bounds(series));
  REQUIRE(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
  REQUIRE(svg.find("</svg>") != std::string::npos);
  REQUIRE(svg.find(">box<") != std::string::npos);
  REQUIRE(svg.find(">cls<") != std::string::npos);
  std::size_t polylines = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++polylines;
    ++pos;
  }
  REQUIRE(polylines == 2);
}

TEST_CASE("data_bounds is the exact envelope of the input") {
  PlotSeries a;
  a.xs = {0, 5, 10};
  a.ys = {0.75, 0.25, 0.5};
  PlotSeries b;
  b.xs = {2, 3};
  b.ys = {0.9, 0.1};
  const std::vector<PlotSeries> series = {a, b};
  const PlotBounds bounds = ymu::data_bounds(series);
  REQUIRE(bounds.x_min == 0.0);
  REQUIRE(bounds.x_max == 10.0);
  REQUIRE(bounds.y_min == 0.1);
  REQUIRE(bounds.y_max == 0.9);

  // Tick labels show the exact extremes in %.4g form.
  const std::string svg = ymu::render_line_plot("t", "x", "y", series, bounds);
  REQUIRE(svg.find(">0.1<") != std::string::npos);
  REQUIRE(svg.find(">0.9<") != std::string::npos);
  REQUIRE(svg.find(">10<") != std::string::npos);

  REQUIRE_THROWS_AS(ymu::data_bounds(std::vector<PlotSeries>{}), std::invalid_argument);
}

TEST_CASE("degenerate ranges collapse to the plot midpoint") {
  PlotSeries s;
  s.label = "flat";
  s.xs = {1.0, 1.0};
  s.ys = {2.0, 2.0};
  const std::vector<PlotSeries> series = {s};
  const std::string svg =
      ymu::render_line_plot("t", "x", "y", series, ymu::data_bounds(series));
  REQUIRE(svg.find("330.00,230.00") != std::string::npos);
}

TEST_CASE("plot titles are XML-escaped") {
  PlotSeries s;
  s.label = "a<b";
  s.xs = {0, 1};
  s.ys = {0, 1};
  const std::string svg = ymu::render_line_plot("x & y", "in", "out", std::vector{s},
                                                PlotBounds{0, 1, 0, 1});
  REQUIRE(svg.find("x &amp; y") != std::string::npos);
  REQUIRE(svg.find("a&lt;b") != std::string::npos);
  REQUIRE(svg.find("x & y") == std::string::npos);
}

TEST_CASE("csv round trips preserve field strings exactly") {
  const std::vector<std::vector<std::string>> rows = {
      {"metric", "class", "value"},
      {"ap50", "Occupant State - Abnormal", "0.995000"},
      {"note", "with,comma", "line\nbreak"},
      {"quote", "say \"hi\"", "1"},
  };
  const std::string text = ymu::write_csv(rows);
  REQUIRE(ymu::parse_csv(text) == rows);
  // Value strings come back byte-identical, not re-formatted.
  REQUIRE(ymu::parse_csv(text)[1][2] == "0.995000");
}

TEST_CASE("csv parser handles plain and quoted forms") {
  REQUIRE(ymu::parse_csv("a,b\nc,d\n") ==
          std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}});
  REQUIRE(ymu::parse_csv("a,\"b,c\"\r\n") ==
          std::vector<std::vector<std::string>>{{"a", "b,c"}});
  REQUIRE(ymu::parse_csv("\"he said \"\"hi\"\"\",x") ==
          std::vector<std::vector<std::string>>{{"he said \"hi\"", "x"}});
  REQUIRE(ymu::parse_csv("").empty());
  REQUIRE(ymu::parse_csv("a,,b\n") ==
          std::vector<std::vector<std::string>>{{"a", "", "b"}});
  REQUIRE_THROWS_AS(ymu::parse_csv("\"unterminated"), ymu::InputError);
}
