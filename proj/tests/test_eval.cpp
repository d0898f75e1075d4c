#include "catch2/catch_amalgamated.hpp"

#include <chrono>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ymu/common.hpp"
#include "ymu/eval.hpp"

using ymu::Box;
using ymu::EvalDetection;
using ymu::GroundTruth;
using ymu::Rng64;

namespace {

// Coarse-grid detections and ground truths: scores in tenths and corners in
// multiples of 5 make score ties and IoU ties routine instead of rare.
struct MicroCase {
  std::vector<EvalDetection> dets;
  std::vector<GroundTruth> gts;
};

Box random_coarse_box(Rng64& rng) {
  const float x1 = static_cast<float>(rng.bounded(8)) * 5.0f;
  const float y1 = static_cast<float>(rng.bounded(8)) * 5.0f;
  const float w = static_cast<float>(1 + rng.bounded(5)) * 5.0f;
  const float h = static_cast<float>(1 + rng.bounded(5)) * 5.0f;
  return {x1, y1, x1 + w, y1 + h};
}

MicroCase random_micro_case(Rng64& rng) {
  MicroCase c;
  const int images = 1 + static_cast<int>(rng.bounded(5));
  for (int i = 0; i < images; ++i) {
    const std::string name = "img" + std::to_string(i);
    const int n_gt = static_cast<int>(rng.bounded(4));
    for (int g = 0; g < n_gt; ++g)
      c.gts.push_back({name, static_cast<int>(rng.bounded(2)), random_coarse_box(rng)});
    const int n_det = static_cast<int>(rng.bounded(7));
    for (int d = 0; d < n_det; ++d) {
      EvalDetection det;
      det.image = name;
      det.class_id = static_cast<int>(rng.bounded(2));
      det.score = static_cast<double>(rng.bounded(11)) / 10.0;
      // Half the detections sit exactly on some ground truth of the image.
      if (n_gt > 0 && rng.bounded(2) == 0)
        det.box = c.gts[c.gts.size() - 1 - rng.bounded(n_gt)].box;
      else
        det.box = random_coarse_box(rng);
      c.dets.push_back(det);
    }
  }
  return c;
}

}  // namespace

TEST_CASE("match_detections scores the textbook cases") {
  const GroundTruth gt{"a", 0, {0, 0, 10, 10}};

  SECTION("exact overlap is a true positive") {
    const EvalDetection det{"a", 0, 0.9, {0, 0, 10, 10}};
    const auto m = ymu::match_detections(std::vector{det}, std::vector{gt}, 0.5, 1);
    REQUIRE(m.detections.size() == 1);
    REQUIRE(m.detections[0].is_tp);
    REQUIRE(m.gt_counts == std::vector<long long>{1});
  }

  SECTION("IoU 0.49 misses a 0.5 threshold") {
    const EvalDetection det{"a", 0, 0.9, {0, 0, 10, 4.9f}};
    const auto m = ymu::match_detections(std::vector{det}, std::vector{gt}, 0.5, 1);
    REQUIRE_FALSE(m.detections[0].is_tp);
  }

  SECTION("two detections over one ground truth yield one TP") {
    const std::vector<EvalDetection> dets = {{"a", 0, 0.6, {0, 0, 10, 10}},
                                             {"a", 0, 0.8, {1, 0, 10, 10}}};
    const auto m = ymu::match_detections(dets, std::vector{gt}, 0.5, 1);
    // Visit order is by score: the 0.8 detection wins the ground truth.
    REQUIRE(m.detections[0].score == 0.8);
    REQUIRE(m.detections[0].is_tp);
    REQUIRE_FALSE(m.detections[1].is_tp);
  }

  SECTION("detections never match across images or classes") {
    const std::vector<EvalDetection> dets = {{"b", 0, 0.9, {0, 0, 10, 10}},
                                             {"a", 1, 0.9, {0, 0, 10, 10}}};
    const auto m = ymu::match_detections(dets, std::vector{gt}, 0.5, 2);
    REQUIRE_FALSE(m.detections[0].is_tp);
    REQUIRE_FALSE(m.detections[1].is_tp);
  }
}

TEST_CASE("match_detections breaks IoU ties by ground-truth input order") {
  const std::vector<GroundTruth> gts = {{"a", 0, {0, 0, 10, 5}}, {"a", 0, {0, 5, 10, 10}}};
  // The first detection overlaps both halves equally; the second sits
  // exactly on the later ground truth. Both can only be TPs if the tie went
  // to the earlier ground truth.
  const std::vector<EvalDetection> dets = {{"a", 0, 0.9, {0, 0, 10, 10}},
                                           {"a", 0, 0.8, {0, 5, 10, 10}}};
  const auto m = ymu::match_detections(dets, gts, 0.5, 1);
  REQUIRE(m.detections[0].is_tp);
  REQUIRE(m.detections[1].is_tp);
}

TEST_CASE("match_detections validates arguments") {
  REQUIRE_THROWS_AS(ymu::match_detections({}, {}, 0.0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(ymu::match_detections({}, {}, 1.5, 1), std::invalid_argument);
  const std::vector<EvalDetection> bad = {{"a", 3, 0.5, {0, 0, 1, 1}}};
  REQUIRE_THROWS_AS(ymu::match_detections(bad, {}, 0.5, 2), std::invalid_argument);
}

TEST_CASE("pr_curve cumulates in score order") {
  const GroundTruth gt{"a", 0, {0, 0, 10, 10}};

  SECTION("single true positive") {
    const EvalDetection det{"a", 0, 0.9, {0, 0, 10, 10}};
    const auto curve =
        ymu::pr_curve(ymu::match_detections(std::vector{det}, std::vector{gt}, 0.5, 1), 0);
    REQUIRE(curve.points.size() == 1);
    REQUIRE(curve.points[0].recall == 1.0);
    REQUIRE(curve.points[0].precision == 1.0);
  }

  SECTION("false positive outranking the true positive") {
    const std::vector<EvalDetection> dets = {{"a", 0, 0.9, {50, 50, 60, 60}},
                                             {"a", 0, 0.8, {0, 0, 10, 10}}};
    const auto curve =
        ymu::pr_curve(ymu::match_detections(dets, std::vector{gt}, 0.5, 1), 0);
    REQUIRE(curve.points.size() == 2);
    REQUIRE(curve.points[0].recall == 0.0);
    REQUIRE(curve.points[0].precision == 0.0);
    REQUIRE(curve.points[1].recall == 1.0);
    REQUIRE(curve.points[1].precision == 0.5);
  }

  SECTION("no detections give an empty curve") {
    const auto curve = ymu::pr_curve(ymu::match_detections({}, std::vector{gt}, 0.5, 1), 0);
    REQUIRE(curve.points.empty());
    REQUIRE(curve.gt_count == 1);
    REQUIRE(ymu::average_precision(curve) == 0.0);
  }

  SECTION("other classes are filtered out") {
    const std::vector<EvalDetection> dets = {{"a", 1, 0.9, {0, 0, 10, 10}}};
    const auto curve = ymu::pr_curve(ymu::match_detections(dets, std::vector{gt}, 0.5, 2), 0);
    REQUIRE(curve.points.empty());
  }
}

TEST_CASE("average_precision follows the 101-point rule") {
  SECTION("perfect single detection") {
    ymu::PRCurve curve;
    curve.gt_count = 1;
    curve.points = {{1.0, 1.0}};
    REQUIRE(ymu::average_precision(curve) == 1.0);
  }

  SECTION("FP-then-TP flattens the envelope to one half") {
    ymu::PRCurve curve;
    curve.gt_count = 1;
    curve.points = {{0.0, 0.0}, {1.0, 0.5}};
    REQUIRE(ymu::average_precision(curve) == 0.5);
  }

  SECTION("zero ground truth uses the documented convention") {
    ymu::PRCurve with_dets;
    with_dets.gt_count = 0;
    with_dets.points = {{0.0, 0.0}};
    REQUIRE(ymu::average_precision(with_dets) == 0.0);

    ymu::PRCurve empty;
    empty.gt_count = 0;
    REQUIRE(ymu::average_precision(empty) == 1.0);
  }
}

TEST_CASE("evaluate scores a perfect detector as all ones") {
  Rng64 rng(11);
  std::vector<GroundTruth> gts;
  std::vector<EvalDetection> dets;
  for (int i = 0; i < 4; ++i) {
    const std::string name = "img" + std::to_string(i);
    for (int g = 0; g < 2; ++g) {
      const GroundTruth gt{name, static_cast<int>(rng.bounded(3)), random_coarse_box(rng)};
      gts.push_back(gt);
      dets.push_back({name, gt.class_id, 0.9, gt.box});
    }
  }
  const auto s = ymu::evaluate(dets, gts, 3);
  REQUIRE(s.has_ground_truth);
  REQUIRE(s.map50 == 1.0);
  REQUIRE(s.map50_95 == 1.0);
  REQUIRE(s.precision == 1.0);
  REQUIRE(s.recall == 1.0);
  for (int c = 0; c < 3; ++c) {
    const long long diag = s.confusion.at(c, c);
    for (int a = 0; a <= 3; ++a)
      if (a != c) REQUIRE(s.confusion.at(c, a) == 0);
    REQUIRE(diag == s.gt_counts[static_cast<std::size_t>(c)]);
  }
}

TEST_CASE("evaluate conventions for empty inputs") {
  const std::vector<GroundTruth> gts = {{"a", 0, {0, 0, 10, 10}}};

  SECTION("no detections: precision 0, recall 0") {
    const auto s = ymu::evaluate({}, gts, 2);
    REQUIRE(s.has_ground_truth);
    REQUIRE(s.precision == 0.0);
    REQUIRE(s.recall == 0.0);
    REQUIRE(s.map50 == 0.0);
  }

  SECTION("no ground truth at all is reported explicitly") {
    const std::vector<EvalDetection> dets = {{"a", 0, 0.9, {0, 0, 10, 10}}};
    const auto s = ymu::evaluate(dets, {}, 2);
    REQUIRE_FALSE(s.has_ground_truth);
    REQUIRE(s.map50 == 0.0);
  }
}

TEST_CASE("confusion_matrix covers the three textbook cases") {
  const std::vector<GroundTruth> gts = {{"a", 0, {0, 0, 10, 10}}, {"a", 1, {20, 20, 30, 30}}};

  SECTION("perfect detector is diagonal") {
    const std::vector<EvalDetection> dets = {{"a", 0, 0.9, {0, 0, 10, 10}},
                                             {"a", 1, 0.9, {20, 20, 30, 30}}};
    const auto m = ymu::confusion_matrix(dets, gts, 0.5, 0.25, 2);
    REQUIRE(m.at(0, 0) == 1);
    REQUIRE(m.at(1, 1) == 1);
    REQUIRE(m.at(0, 1) == 0);
    REQUIRE(m.at(2, 0) == 0);
    REQUIRE(m.at(2, 1) == 0);
  }

  SECTION("wrong class lands off the diagonal") {
    const std::vector<EvalDetection> dets = {{"a", 1, 0.9, {0, 0, 10, 10}}};
    const auto m = ymu::confusion_matrix(dets, gts, 0.5, 0.25, 2);
    REQUIRE(m.at(1, 0) == 1);
    REQUIRE(m.at(2, 1) == 1);  // the class-1 gt stays unmatched
    REQUIRE(m.at(1, 1) == 0);
  }

  SECTION("confidence 1.0 filters everything into the background row") {
    const std::vector<EvalDetection> dets = {{"a", 0, 1.0, {0, 0, 10, 10}}};
    const auto m = ymu::confusion_matrix(dets, gts, 0.5, 1.0, 2);
    REQUIRE(m.at(2, 0) == 1);
    REQUIRE(m.at(2, 1) == 1);
    REQUIRE(m.at(0, 0) == 0);
  }
}

TEST_CASE("AP ignores any monotone rescaling of scores") {
  Rng64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const MicroCase c = random_micro_case(rng);
    auto rescaled = c.dets;
    for (auto& d : rescaled) d.score = 0.05 + d.score / 2.0;
    const auto a = ymu::evaluate(c.dets, c.gts, 2);
    const auto b = ymu::evaluate(rescaled, c.gts, 2);
    REQUIRE(a.ap50 == b.ap50);
    REQUIRE(a.ap50_95 == b.ap50_95);
    REQUIRE(a.map50 == b.map50);
    REQUIRE(a.recall == b.recall);
  }
}

TEST_CASE("a trailing false positive never raises AP") {
  Rng64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    MicroCase c = random_micro_case(rng);
    if (c.gts.empty()) continue;
    const auto before = ymu::evaluate(c.dets, c.gts, 2);
    EvalDetection junk;
    junk.image = c.gts[0].image;
    junk.class_id = c.gts[0].class_id;
    junk.score = 0.0;  // below every existing score
    junk.box = {1000, 1000, 1010, 1010};
    c.dets.push_back(junk);
    const auto after = ymu::evaluate(c.dets, c.gts, 2);
    for (std::size_t k = 0; k < before.ap50.size(); ++k) {
      REQUIRE(after.ap50[k] <= before.ap50[k] + 1e-12);
      REQUIRE(after.ap50_95[k] <= before.ap50_95[k] + 1e-12);
    }
  }
}

TEST_CASE("an extra exact detection never lowers final recall") {
  Rng64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    MicroCase c = random_micro_case(rng);
    if (c.gts.empty()) continue;
    const auto m_before = ymu::match_detections(c.dets, c.gts, 0.5, 2);
    long long tp_before = 0;
    for (const auto& d : m_before.detections) tp_before += d.is_tp ? 1 : 0;

    EvalDetection extra;
    extra.image = c.gts[0].image;
    extra.class_id = c.gts[0].class_id;
    extra.score = 0.55;
    extra.box = c.gts[0].box;
    c.dets.push_back(extra);
    const auto m_after = ymu::match_detections(c.dets, c.gts, 0.5, 2);
    long long tp_after = 0;
    for (const auto& d : m_after.detections) tp_after += d.is_tp ? 1 : 0;
    REQUIRE(tp_after >= tp_before);
  }
}

TEST_CASE("evaluate equals the brute-force reference on 1000 micro-datasets") {
  Rng64 rng(31);
  const auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    const MicroCase c = random_micro_case(rng);
    const auto got = ymu::evaluate(c.dets, c.gts, 2);
    const auto want = oracle::evaluate_ref(c.dets, c.gts, 2);

    REQUIRE(got.has_ground_truth == want.has_ground_truth);
    REQUIRE(got.ap50 == want.ap50);
    REQUIRE(got.ap50_95 == want.ap50_95);
    REQUIRE(got.map50 == want.map50);
    REQUIRE(got.map50_95 == want.map50_95);
    REQUIRE(got.precision == want.precision);
    REQUIRE(got.recall == want.recall);
    REQUIRE(got.confusion.counts == want.confusion);

    REQUIRE(got.map50_95 <= got.map50 + 1e-12);
    REQUIRE(got.map50 >= 0.0);
    REQUIRE(got.map50 <= 1.0);
    REQUIRE(got.precision >= 0.0);
    REQUIRE(got.precision <= 1.0);
    REQUIRE(got.recall >= 0.0);
    REQUIRE(got.recall <= 1.0);
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  REQUIRE(std::chrono::duration_cast<std::chrono::seconds>(elapsed).count() < 60);
}

TEST_CASE("evaluate is deterministic") {
  Rng64 rng(41);
  const MicroCase c = random_micro_case(rng);
  const auto a = ymu::evaluate(c.dets, c.gts, 2);
  const auto b = ymu::evaluate(c.dets, c.gts, 2);
  REQUIRE(a.ap50 == b.ap50);
  REQUIRE(a.precision == b.precision);
  REQUIRE(a.confusion.counts == b.confusion.counts);
}
