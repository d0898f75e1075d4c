// ymu: command-line front end for the detection toolkit.
//
// Subcommands: build-info, augment, detect, eval, report.
// Exit codes: 0 success, 1 input error, 2 internal failure.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ymu/augment.hpp"
#include "ymu/common.hpp"
#include "ymu/dataset.hpp"
#include "ymu/detect.hpp"
#include "ymu/eval.hpp"
#include "ymu/forward.hpp"
#include "ymu/image.hpp"
#include "ymu/model.hpp"
#include "ymu/report.hpp"
#include "ymu/tensor.hpp"
#include "ymu/weights.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ymu::InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ymu::InputError(path + ": cannot open for writing");
  out << content;
  if (!out) throw ymu::InputError(path + ": write failed");
}

// Writes to --out when given, else stdout.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_text_file(out_path, content);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ymu::ClassMap load_class_map(const std::string& path) {
  if (path.empty()) return ymu::default_class_map();
  return ymu::parse_class_file(read_text_file(path));
}

void require_img_size(int img) {
  if (img < 32 || img % 32 != 0)
    throw ymu::InputError("--img must be a positive multiple of 32, got " +
                          std::to_string(img));
}

// ---------------------------------------------------------------------------
// build-info

struct BuildInfoOptions {
  int img = 640;
  std::string classes_path;
  std::string format = "table";
  std::string out_path;
};

void run_build_info(const BuildInfoOptions& opt) {
  require_img_size(opt.img);
  const ymu::ClassMap classes = load_class_map(opt.classes_path);
  const ymu::ModelGraph g = ymu::build_yolov5mu(static_cast<int>(classes.size()));
  const ymu::ParamTable params = ymu::param_count(g);
  const std::vector<ymu::ShapeRow> shapes = ymu::infer_shapes(g, opt.img, opt.img);

  struct Row {
    int id;
    std::string name;
    int in_ch, out_ch, out_c, out_h, out_w;
    long long params;
    unsigned long long flops;
  };
  std::vector<Row> rows;
  unsigned long long total_flops = 0;
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    const ymu::LayerSpec& l = g.layers[i];
    const unsigned long long fl =
        2ull * ymu::layer_macs(g, shapes, l, opt.img, opt.img);
    total_flops += fl;
    rows.push_back({l.id, l.name, l.in_channels, l.out_channels, shapes[i].c,
                    shapes[i].h, shapes[i].w, params.rows[i].params, fl});
  }

  std::string text;
  if (opt.format == "table") {
    char line[160];
    std::snprintf(line, sizeof line, "%-3s %-8s %6s %6s %16s %12s %16s\n", "id",
                  "name", "in_ch", "out_ch", "output", "params", "flops");
    text += line;
    for (const Row& r : rows) {
      std::string shape = std::to_string(r.out_c);
      if (r.out_h > 0)
        shape += "x" + std::to_string(r.out_h) + "x" + std::to_string(r.out_w);
      else
        shape += " (3 maps)";
      std::snprintf(line, sizeof line, "%-3d %-8s %6d %6d %16s %12lld %16llu\n",
                    r.id, r.name.c_str(), r.in_ch, r.out_ch, shape.c_str(),
                    r.params, r.flops);
      text += line;
    }
    std::snprintf(line, sizeof line,
                  "total: %d classes, %lld parameters, %llu flops (%.4f GFLOPs "
                  "at %dx%d)\n",
                  static_cast<int>(classes.size()), params.total, total_flops,
                  total_flops / 1e9, opt.img, opt.img);
    text += line;
  } else if (opt.format == "csv") {
    std::vector<std::vector<std::string>> csv;
    csv.push_back({"id", "name", "in_channels", "out_channels", "out_c", "out_h",
                   "out_w", "params", "flops"});
    for (const Row& r : rows)
      csv.push_back({std::to_string(r.id), r.name, std::to_string(r.in_ch),
                     std::to_string(r.out_ch), std::to_string(r.out_c),
                     std::to_string(r.out_h), std::to_string(r.out_w),
                     std::to_string(r.params), std::to_string(r.flops)});
    csv.push_back({"total", "", "", "", "", "", "", std::to_string(params.total),
                   std::to_string(total_flops)});
    text = ymu::write_csv(csv);
  } else if (opt.format == "json") {
    json doc;
    doc["img"] = opt.img;
    doc["num_classes"] = classes.size();
    doc["layers"] = json::array();
    for (const Row& r : rows) {
      json jr;
      jr["id"] = r.id;
      jr["name"] = r.name;
      jr["in_channels"] = r.in_ch;
      jr["out_channels"] = r.out_ch;
      jr["out_c"] = r.out_c;
      jr["out_h"] = r.out_h;
      jr["out_w"] = r.out_w;
      jr["params"] = r.params;
      jr["flops"] = r.flops;
      doc["layers"].push_back(jr);
    }
    doc["total_params"] = params.total;
    doc["total_flops"] = total_flops;
    doc["total_gflops"] = total_flops / 1e9;
    text = doc.dump(2) + "\n";
  } else {
    throw ymu::InputError("--format must be table, csv, or json");
  }
  emit(opt.out_path, text);
}

// ---------------------------------------------------------------------------
// augment

struct AugmentOptions {
  std::string manifest_path;
  std::string out_dir;
  std::string classes_path;
  int img = 640;
  std::uint64_t seed = 0;
  double gray_prob = 0.15;
  double hue = 0.10;
  double sat = 0.25;
  double bright = 0.05;
  bool letterbox = false;
};

int run_augment(const AugmentOptions& opt) {
  const ymu::ClassMap classes = load_class_map(opt.classes_path);
  ymu::AugmentConfig cfg;
  cfg.target_size = opt.img;
  cfg.gray_probability = opt.gray_prob;
  cfg.hue_limit = opt.hue;
  cfg.sat_limit = opt.sat;
  cfg.bright_limit = opt.bright;
  cfg.letterbox = opt.letterbox;
  cfg.master_seed = opt.seed;
  ymu::validate_config(cfg);

  const std::vector<ymu::ManifestEntry> entries =
      ymu::parse_manifest(read_text_file(opt.manifest_path));
  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "labels");

  std::string log =
      "index\tsource\tgrayscale\thue_offset\tsat_scale\tbright_scale\n";
  std::vector<ymu::ManifestEntry> out_entries;
  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    try {
      const ymu::ImageBuffer img = ymu::read_ppm(entries[i].image_path);
      std::vector<std::string> warnings;
      std::vector<ymu::Annotation> boxes;
      try {
        boxes = ymu::parse_label_file(read_text_file(entries[i].label_path),
                                      static_cast<int>(classes.size()), &warnings);
      } catch (const ymu::InputError& e) {
        throw ymu::InputError(entries[i].label_path + ": " + e.what());
      }
      for (const std::string& w : warnings)
        std::cerr << "warning: " << entries[i].label_path << ": " << w << "\n";

      const ymu::AugmentedSample sample = ymu::augment_sample(img, boxes, cfg, i);
      char stem[32];
      std::snprintf(stem, sizeof stem, "aug_%06zu", i);
      const std::string img_rel = std::string("images/") + stem + ".ppm";
      const std::string lbl_rel = std::string("labels/") + stem + ".txt";
      ymu::write_ppm((out_dir / img_rel).string(), sample.image);
      write_text_file((out_dir / lbl_rel).string(),
                      ymu::write_label_file(sample.boxes));
      out_entries.push_back({img_rel, lbl_rel});

      const ymu::AugmentParams p = ymu::draw_augment_params(cfg, i);
      log += std::to_string(i) + "\t" + entries[i].image_path + "\t" +
             (p.grayscale ? "1" : "0") + "\t" + fmt("%.9g", p.hue_offset) + "\t" +
             fmt("%.9g", p.sat_scale) + "\t" + fmt("%.9g", p.bright_scale) + "\n";
    } catch (const ymu::InputError& e) {
      std::cerr << "error: sample " << i << ": " << e.what() << "\n";
      ++failures;
    }
  }
  write_text_file((out_dir / "manifest.tsv").string(),
                  ymu::write_manifest(out_entries));
  write_text_file((out_dir / "augment_log.tsv").string(), log);
  std::cout << "augmented " << out_entries.size() << " of " << entries.size()
            << " samples into " << opt.out_dir << "\n";
  return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// detect

struct DetectOptions {
  std::string weights_path;
  std::vector<std::string> images;
  std::string classes_path;
  int img = 640;
  double conf = ymu::kDefaultConfThreshold;
  double iou = ymu::kDefaultIouThreshold;
  std::string out_path;
};

void run_detect(const DetectOptions& opt) {
  require_img_size(opt.img);
  if (!(opt.conf >= 0.0 && opt.conf <= 1.0))
    throw ymu::InputError("--conf must be in [0,1]");
  if (!(opt.iou >= 0.0 && opt.iou <= 1.0))
    throw ymu::InputError("--iou must be in [0,1]");

  const ymu::WeightStore store = ymu::load_weights(opt.weights_path);
  if (!opt.classes_path.empty()) {
    const ymu::ClassMap classes = load_class_map(opt.classes_path);
    if (static_cast<int>(classes.size()) != store.num_classes)
      throw ymu::InputError("class file lists " + std::to_string(classes.size()) +
                            " names but the weights expect " +
                            std::to_string(store.num_classes));
  }
  const ymu::ModelGraph g = ymu::build_yolov5mu(store.num_classes);
  ymu::validate_weights(g, store);

  std::string out;
  for (const std::string& path : opt.images) {
    const ymu::ImageBuffer src = ymu::read_ppm(path);
    const ymu::ImageBuffer resized = ymu::resize_bilinear(src, opt.img, opt.img);
    ymu::Tensor input(1, 3, opt.img, opt.img);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < opt.img; ++y)
        for (int x = 0; x < opt.img; ++x)
          input.at(0, c, y, x) = static_cast<float>(resized.at(x, y, c) / 255.0);

    const std::array<ymu::Tensor, 3> maps = ymu::forward(g, store, input);
    std::vector<std::array<int, 2>> level_hw;
    for (const ymu::Tensor& m : maps) level_hw.push_back({m.h(), m.w()});
    const std::vector<ymu::AnchorPoint> anchors =
        ymu::make_anchor_points(level_hw, g.strides);
    std::vector<ymu::Detection> dets =
        ymu::decode_predictions(maps, anchors, opt.conf);
    for (ymu::Detection& d : dets) d.box = ymu::clip_to_image(d.box, opt.img, opt.img);
    dets = ymu::nms(dets, opt.iou);

    // Map boxes from model space back to source pixels.
    const double sx = static_cast<double>(src.width()) / opt.img;
    const double sy = static_cast<double>(src.height()) / opt.img;
    for (const ymu::Detection& d : dets) {
      json line;
      line["image"] = path;
      line["class_id"] = d.class_id;
      line["score"] = d.score;
      line["box"] = {static_cast<float>(d.box.x1 * sx), static_cast<float>(d.box.y1 * sy),
                     static_cast<float>(d.box.x2 * sx), static_cast<float>(d.box.y2 * sy)};
      out += line.dump() + "\n";
    }
    std::cerr << path << ": " << dets.size() << " detections\n";
  }
  emit(opt.out_path, out);
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string dets_path;
  std::string manifest_path;
  std::string classes_path;
  std::string out_dir;
};

std::vector<ymu::EvalDetection> parse_detections_jsonl(const std::string& text) {
  std::vector<ymu::EvalDetection> dets;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ymu::InputError("detections line " + std::to_string(line_no) + ": " +
                            e.what());
    }
    try {
      ymu::EvalDetection d;
      d.image = doc.at("image").get<std::string>();
      d.class_id = doc.at("class_id").get<int>();
      d.score = doc.at("score").get<double>();
      const auto& box = doc.at("box");
      if (!box.is_array() || box.size() != 4)
        throw ymu::InputError("box must be an array of 4 numbers");
      d.box = {box[0].get<float>(), box[1].get<float>(), box[2].get<float>(),
               box[3].get<float>()};
      dets.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw ymu::InputError("detections line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return dets;
}

void run_eval(const EvalOptions& opt) {
  const ymu::ClassMap classes = load_class_map(opt.classes_path);
  const int nc = static_cast<int>(classes.size());
  const std::vector<ymu::ManifestEntry> entries =
      ymu::parse_manifest(read_text_file(opt.manifest_path));
  const std::vector<ymu::EvalDetection> dets =
      parse_detections_jsonl(read_text_file(opt.dets_path));

  std::vector<ymu::GroundTruth> gts;
  std::map<std::string, bool> known_images;
  for (const ymu::ManifestEntry& e : entries) {
    known_images[e.image_path] = true;
    const ymu::ImageBuffer img = ymu::read_ppm(e.image_path);
    std::vector<std::string> warnings;
    const std::vector<ymu::Annotation> boxes =
        ymu::parse_label_file(read_text_file(e.label_path), nc, &warnings);
    for (const std::string& w : warnings)
      std::cerr << "warning: " << e.label_path << ": " << w << "\n";
    for (const ymu::Annotation& a : boxes)
      gts.push_back({e.image_path, a.class_id,
                     ymu::norm_to_pixel(a, img.width(), img.height())});
  }
  for (const ymu::EvalDetection& d : dets)
    if (!known_images.count(d.image))
      throw ymu::InputError("detection references image '" + d.image +
                            "' which is not in the manifest");

  const ymu::EvalSummary s = ymu::evaluate(dets, gts, nc);

  fs::create_directories(opt.out_dir);
  std::vector<std::vector<std::string>> csv;
  csv.push_back({"metric", "class", "value"});
  if (!s.has_ground_truth) {
    csv.push_back({"no_ground_truth", "", "1"});
  } else {
    for (int c = 0; c < nc; ++c)
      csv.push_back({"ap50", classes.names[c], fmt("%.6f", s.ap50[c])});
    for (int c = 0; c < nc; ++c)
      csv.push_back({"ap50_95", classes.names[c], fmt("%.6f", s.ap50_95[c])});
    csv.push_back({"map50", "", fmt("%.6f", s.map50)});
    csv.push_back({"map50_95", "", fmt("%.6f", s.map50_95)});
    csv.push_back({"precision", "", fmt("%.6f", s.precision)});
    csv.push_back({"recall", "", fmt("%.6f", s.recall)});
  }
  write_text_file((fs::path(opt.out_dir) / "metrics.csv").string(),
                  ymu::write_csv(csv));

  json doc;
  doc["has_ground_truth"] = s.has_ground_truth;
  doc["classes"] = classes.names;
  doc["gt_counts"] = s.gt_counts;
  doc["ap50"] = s.ap50;
  doc["ap50_95"] = s.ap50_95;
  doc["map50"] = s.map50;
  doc["map50_95"] = s.map50_95;
  doc["precision"] = s.precision;
  doc["recall"] = s.recall;
  doc["confusion"] = json::array();
  for (int pred = 0; pred <= nc; ++pred) {
    json row = json::array();
    for (int actual = 0; actual <= nc; ++actual)
      row.push_back(s.confusion.at(pred, actual));
    doc["confusion"].push_back(row);
  }
  write_text_file((fs::path(opt.out_dir) / "metrics.json").string(),
                  doc.dump(2) + "\n");

  const ymu::MatchResult match50 = ymu::match_detections(dets, gts, 0.50, nc);
  std::vector<std::vector<std::string>> pr;
  pr.push_back({"class", "recall", "precision"});
  for (int c = 0; c < nc; ++c) {
    const ymu::PRCurve curve = ymu::pr_curve(match50, c);
    for (const ymu::PrPoint& p : curve.points)
      pr.push_back({classes.names[c], fmt("%.6f", p.recall), fmt("%.6f", p.precision)});
  }
  write_text_file((fs::path(opt.out_dir) / "pr_curves.csv").string(),
                  ymu::write_csv(pr));

  if (s.has_ground_truth) {
    std::cout << "map50 " << fmt("%.6f", s.map50) << "\n"
              << "map50_95 " << fmt("%.6f", s.map50_95) << "\n"
              << "precision " << fmt("%.6f", s.precision) << "\n"
              << "recall " << fmt("%.6f", s.recall) << "\n";
  } else {
    std::cout << "no ground truth boxes in the manifest\n";
  }
}

// ---------------------------------------------------------------------------
// report

struct ReportOptions {
  std::string metrics_path;
  std::string pr_path;
  std::string loss_log_path;
  std::string out_dir;
};

double parse_cell(const std::string& s, const char* what, std::size_t row) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ymu::InputError(std::string(what) + " row " + std::to_string(row) +
                          ": '" + s + "' is not a number");
  }
}

std::string safe_file_component(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  return out.empty() ? std::string("_") : out;
}

void run_report(const ReportOptions& opt) {
  if (opt.metrics_path.empty() && opt.pr_path.empty() && opt.loss_log_path.empty())
    throw ymu::InputError("report needs at least one of --metrics, --pr, --loss-log");
  fs::create_directories(opt.out_dir);

  if (!opt.metrics_path.empty()) {
    const auto rows = ymu::parse_csv(read_text_file(opt.metrics_path));
    write_text_file((fs::path(opt.out_dir) / "metrics_summary.csv").string(),
                    ymu::write_csv(rows));
  }

  if (!opt.pr_path.empty()) {
    const auto rows = ymu::parse_csv(read_text_file(opt.pr_path));
    // class,recall,precision with a header row; one series per class.
    std::vector<std::string> order;
    std::map<std::string, ymu::PlotSeries> by_class;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() != 3)
        throw ymu::InputError("pr row " + std::to_string(i + 1) +
                              ": expected 3 fields");
      const std::string& cls = rows[i][0];
      if (!by_class.count(cls)) {
        order.push_back(cls);
        by_class[cls].label = cls;
      }
      by_class[cls].xs.push_back(parse_cell(rows[i][1], "pr", i + 1));
      by_class[cls].ys.push_back(parse_cell(rows[i][2], "pr", i + 1));
    }
    for (const std::string& cls : order) {
      const std::array<ymu::PlotSeries, 1> series{by_class[cls]};
      const std::string svg = ymu::render_line_plot(
          "precision-recall: " + cls, "recall", "precision", series,
          ymu::PlotBounds{0.0, 1.0, 0.0, 1.0});
      write_text_file((fs::path(opt.out_dir) /
                       ("pr_" + safe_file_component(cls) + ".svg"))
                          .string(),
                      svg);
    }
  }

  if (!opt.loss_log_path.empty()) {
    const auto rows = ymu::parse_csv(read_text_file(opt.loss_log_path));
    // First column is the x axis (epoch/step); every other column is a series.
    if (rows.size() < 2 || rows[0].size() < 2)
      throw ymu::InputError("loss log needs a header row and at least one data row");
    std::vector<ymu::PlotSeries> series(rows[0].size() - 1);
    for (std::size_t c = 1; c < rows[0].size(); ++c)
      series[c - 1].label = rows[0][c];
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() != rows[0].size())
        throw ymu::InputError("loss log row " + std::to_string(i + 1) +
                              ": expected " + std::to_string(rows[0].size()) +
                              " fields");
      const double x = parse_cell(rows[i][0], "loss log", i + 1);
      for (std::size_t c = 1; c < rows[i].size(); ++c) {
        series[c - 1].xs.push_back(x);
        series[c - 1].ys.push_back(parse_cell(rows[i][c], "loss log", i + 1));
      }
    }
    const std::string svg = ymu::render_line_plot(
        "loss curves", rows[0][0], "loss", series, ymu::data_bounds(series));
    write_text_file((fs::path(opt.out_dir) / "loss_curves.svg").string(), svg);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"object detection toolkit: model inspection, augmentation, "
               "inference, evaluation, and reports"};
  app.require_subcommand(1);

  BuildInfoOptions bi;
  CLI::App* cmd_bi = app.add_subcommand(
      "build-info", "print the per-layer parameter/FLOPs table");
  cmd_bi->add_option("--img", bi.img, "input image size (multiple of 32)")
      ->capture_default_str();
  cmd_bi->add_option("--classes", bi.classes_path,
                     "class-name file (one per line; default: built-in 4 classes)");
  cmd_bi->add_option("--format", bi.format, "output format: table|csv|json")
      ->capture_default_str()
      ->check(CLI::IsMember({"table", "csv", "json"}));
  cmd_bi->add_option("--out", bi.out_path, "write to this file instead of stdout");

  AugmentOptions au;
  CLI::App* cmd_au = app.add_subcommand(
      "augment", "augment a dataset manifest (resize + color jitter)");
  cmd_au->add_option("manifest", au.manifest_path, "tab-separated image/label manifest")
      ->required();
  cmd_au->add_option("--out", au.out_dir, "output directory")->required();
  cmd_au->add_option("--classes", au.classes_path,
                     "class-name file (one per line; default: built-in 4 classes)");
  cmd_au->add_option("--img", au.img, "output image size")->capture_default_str();
  cmd_au->add_option("--seed", au.seed, "master seed")->capture_default_str();
  cmd_au->add_option("--gray-prob", au.gray_prob, "grayscale probability")
      ->capture_default_str();
  cmd_au->add_option("--hue", au.hue, "hue shift limit (fraction of the wheel)")
      ->capture_default_str();
  cmd_au->add_option("--sat", au.sat, "saturation scale limit")->capture_default_str();
  cmd_au->add_option("--bright", au.bright, "brightness scale limit")
      ->capture_default_str();
  cmd_au->add_flag("--letterbox", au.letterbox,
                   "aspect-preserving resize with gray padding instead of a stretch");

  DetectOptions de;
  CLI::App* cmd_de = app.add_subcommand("detect", "run inference on PPM images");
  cmd_de->add_option("images", de.images, "input images (PPM P6)")->required();
  cmd_de->add_option("--weights", de.weights_path, "weight file")->required();
  cmd_de->add_option("--classes", de.classes_path,
                     "class-name file; must match the weight file's class count");
  cmd_de->add_option("--img", de.img, "inference size (multiple of 32)")
      ->capture_default_str();
  cmd_de->add_option("--conf", de.conf, "score threshold (keep score > conf)")
      ->capture_default_str();
  cmd_de->add_option("--iou", de.iou, "NMS IoU threshold")->capture_default_str();
  cmd_de->add_option("--out", de.out_path,
                     "detections file (JSON lines); default stdout");

  EvalOptions ev;
  CLI::App* cmd_ev = app.add_subcommand(
      "eval", "score a detections file against manifest ground truth");
  cmd_ev->add_option("--dets", ev.dets_path, "detections file (JSON lines)")
      ->required();
  cmd_ev->add_option("--manifest", ev.manifest_path,
                     "tab-separated image/label manifest")
      ->required();
  cmd_ev->add_option("--classes", ev.classes_path,
                     "class-name file (one per line; default: built-in 4 classes)");
  cmd_ev->add_option("--out", ev.out_dir, "output directory")->required();

  ReportOptions re;
  CLI::App* cmd_re = app.add_subcommand("report", "render SVG plots and CSV tables");
  cmd_re->add_option("--metrics", re.metrics_path,
                     "metrics CSV to pass through as a summary table");
  cmd_re->add_option("--pr", re.pr_path, "pr_curves.csv to plot (one SVG per class)");
  cmd_re->add_option("--loss-log", re.loss_log_path,
                     "loss CSV (x column + one column per series)");
  cmd_re->add_option("--out", re.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (cmd_bi->parsed()) run_build_info(bi);
    if (cmd_au->parsed()) return run_augment(au);
    if (cmd_de->parsed()) run_detect(de);
    if (cmd_ev->parsed()) run_eval(ev);
    if (cmd_re->parsed()) run_report(re);
    return 0;
  } catch (const ymu::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
