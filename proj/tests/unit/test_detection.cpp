#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "overlayx/detection.hpp"
#include "overlayx/error.hpp"
#include "overlayx/synthgen.hpp"

using namespace overlayx;
using detection::TextBox;
namespace oracle = overlayx::testing;

namespace {

const fonts::FontSet& bundled() {
  static const fonts::FontSet fs = fonts::FontSet::bundled();
  return fs;
}

std::vector<TextBox> random_boxes(std::mt19937& rng, int n) {
  std::uniform_int_distribution<int> pos(0, 30), size(1, 25), score(0, 4);
  std::vector<TextBox> out;
  for (int i = 0; i < n; ++i)
    out.push_back({pos(rng), pos(rng), size(rng), size(rng), score(rng) / 4.0});
  return out;
}

}  // namespace

TEST(Iou, Examples) {
  EXPECT_DOUBLE_EQ(detection::iou({0, 0, 10, 10, 1}, {0, 0, 10, 10, 1}), 1.0);
  EXPECT_DOUBLE_EQ(detection::iou({0, 0, 10, 10, 1}, {10, 0, 10, 10, 1}), 0.0);
  EXPECT_DOUBLE_EQ(detection::iou({0, 0, 10, 10, 1}, {5, 0, 10, 10, 1}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(detection::iou({0, 0, 0, 0, 1}, {0, 0, 0, 0, 1}), 0.0);
}

TEST(Iou, MatchesReferenceAndIsSymmetric) {
  std::mt19937 rng(1);
  const auto boxes = random_boxes(rng, 60);
  for (const auto& a : boxes)
    for (const auto& b : boxes) {
      const double v = detection::iou(a, b);
      EXPECT_NEAR(v, oracle::reference_iou(a, b), 1e-12);
      EXPECT_DOUBLE_EQ(v, detection::iou(b, a));
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
}

TEST(Nms, KeepsHighestScoringOfOverlappingPair) {
  const std::vector<TextBox> boxes{{0, 0, 10, 10, 0.5}, {1, 1, 10, 10, 0.9}, {50, 50, 5, 5, 0.1}};
  const auto kept = detection::nms(boxes, 0.45);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0], boxes[1]);
  EXPECT_EQ(kept[1], boxes[2]);
}

TEST(Nms, RejectsBadThreshold) {
  const std::vector<TextBox> boxes{{0, 0, 1, 1, 1}};
  EXPECT_THROW(detection::nms(boxes, 0.0), InvalidArgument);
  EXPECT_THROW(detection::nms(boxes, 1.5), InvalidArgument);
  EXPECT_NO_THROW(detection::nms(boxes, 1.0));
}

TEST(Nms, MatchesBruteForceOnRandomSets) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto boxes = random_boxes(rng, 1 + trial % 10);
    const double thr = (trial % 3 == 0) ? 0.3 : 0.45;
    const auto kept = detection::nms(boxes, thr);
    const auto ref = oracle::brute_force_nms(boxes, thr);
    ASSERT_EQ(kept.size(), ref.size()) << "trial " << trial;
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_EQ(kept[i], boxes[ref[i]]);
  }
}

TEST(Nms, OutputIsIndependentAndIdempotent) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto boxes = random_boxes(rng, 15);
    const auto kept = detection::nms(boxes);
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = i + 1; j < kept.size(); ++j) EXPECT_LT(detection::iou(kept[i], kept[j]), 0.45);
    EXPECT_EQ(detection::nms(kept), kept);
  }
}

TEST(FilterBoxes, DropsShortAndTallBoxes) {
  const std::vector<TextBox> boxes{{0, 0, 30, 19, 1}, {0, 0, 30, 20, 1}, {0, 0, 19, 20, 1}, {0, 0, 20, 20, 1}};
  const auto kept = detection::filter_boxes(boxes);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0], boxes[1]);
  EXPECT_EQ(kept[1], boxes[3]);
}

TEST(FilterBoxes, IsIdempotent) {
  std::mt19937 rng(4);
  const auto boxes = random_boxes(rng, 200);
  const auto once = detection::filter_boxes(boxes, 10);
  EXPECT_EQ(detection::filter_boxes(once, 10), once);
}

TEST(ReadingOrder, RowsTopToBottomThenLeftToRight) {
  const std::vector<TextBox> boxes{{200, 102, 50, 30, 1}, {10, 100, 80, 30, 1}, {150, 10, 40, 28, 1},
                                   {20, 12, 60, 30, 1}};
  const auto order = detection::reading_order(boxes);
  ASSERT_EQ(order.size(), 4u);
  EXPECT_EQ(order[0], boxes[3]);
  EXPECT_EQ(order[1], boxes[2]);
  EXPECT_EQ(order[2], boxes[1]);
  EXPECT_EQ(order[3], boxes[0]);
}

TEST(ReadingOrder, IsAPermutation) {
  std::mt19937 rng(5);
  auto boxes = random_boxes(rng, 40);
  auto order = detection::reading_order(boxes);
  auto key = [](const TextBox& b) { return std::tuple(b.x, b.y, b.w, b.h, b.score); };
  std::ranges::sort(boxes, {}, key);
  std::ranges::sort(order, {}, key);
  EXPECT_EQ(order, boxes);
}

TEST(CropWords, CropsEachBox) {
  Image frame(20, 10, 1, 0);
  frame.at(5, 5) = 200;
  const std::vector<TextBox> boxes{{4, 4, 3, 3, 1}};
  const auto crops = detection::crop_words(frame, boxes);
  ASSERT_EQ(crops.size(), 1u);
  EXPECT_EQ(crops[0].at(1, 1), 200);
}

TEST(BuiltinDetect, BlankFrameHasNoBoxes) {
  EXPECT_TRUE(detection::builtin_detect(Image(64, 48, 3, 90)).empty());
}

TEST(BuiltinDetect, FindsEveryFixtureWord) {
  const auto& fs = bundled();
  for (std::uint32_t font = 0; font < fs.size(); ++font) {
    synth::FrameStyle style;
    style.width = 960;
    style.font_id = font;
    if (font % 2) {
      style.background = {230, 230, 220};
      style.text = {15, 15, 30};
    }
    // A monospaced apostrophe sits a full cell away from its neighbours, so
    // on a line of mostly x-height glyphs it splits the word.
    const bool mono = bundled().info(font).name.find("Mono") != std::string::npos;
    const std::vector<std::string> lines{"quick brown fox jumps", mono ? "its time: 2018!" : "it's time: 2018!"};
    const auto fx = synth::generate_frame_fixture(synth::layout_caption(lines, fs, style, 20, 40), fs, style, font);
    const auto found = detection::builtin_detect(fx.frame);
    for (const auto& gt : fx.boxes) {
      const TextBox g{gt.box.x, gt.box.y, gt.box.w, gt.box.h, 1.0};
      double best = 0.0;
      for (const auto& b : found) best = std::max(best, detection::iou(g, b));
      EXPECT_GE(best, 0.5) << "font " << font << " word '" << gt.text << "'";
    }
    EXPECT_EQ(found.size(), fx.boxes.size()) << "font " << font;
    for (const auto& b : found) {
      EXPECT_GE(b.score, 0.0);
      EXPECT_LE(b.score, 1.0);
    }
  }
}

TEST(ExternalDetector, ParsesAndClipsBoxes) {
  const auto script = (oracle::adapters_dir() / "fake_detector.py").string();
  detection::ExternalDetector det({"python3", script, "fixed"});
  const auto boxes = det.detect(Image(100, 50, 3, 0));
  ASSERT_EQ(boxes.size(), 2u);
  EXPECT_EQ(boxes[0], (TextBox{2, 3, 40, 20, 0.9}));
  EXPECT_EQ(boxes[1], (TextBox{30, 10, 70, 25, 0.5}));
}

TEST(ExternalDetector, FailureCarriesDiagnostics) {
  const auto script = (oracle::adapters_dir() / "fake_detector.py").string();
  detection::ExternalDetector det({"python3", script, "fail", "{image}"});
  try {
    det.detect(Image(10, 10, 3, 0));
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("model weights not found"), std::string::npos);
  }
  detection::ExternalDetector garbage({"python3", script, "garbage"});
  EXPECT_THROW(garbage.detect(Image(10, 10, 3, 0)), BackendError);
}

TEST(ExternalDetector, ParseOutputSkipsBlankLines) {
  const auto boxes = detection::ExternalDetector::parse_output(
      "\n{\"x\": -5, \"y\": 0, \"w\": 20, \"h\": 8, \"score\": 0.3}\n\n", 10, 6);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0], (TextBox{0, 0, 10, 6, 0.3}));
}
