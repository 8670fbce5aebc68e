// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit when any
// fails.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "overlayx/codec.hpp"
#include "overlayx/detection.hpp"
#include "overlayx/evaluation.hpp"
#include "overlayx/imaging.hpp"
#include "overlayx/overlay_merge.hpp"
#include "overlayx/pipeline.hpp"
#include "overlayx/subprocess.hpp"
#include "overlayx/synthgen.hpp"

using namespace overlayx;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Every string over {a,b,c} of length 0..8, indexed by length then base-3 value.
struct AbcStrings {
  static constexpr int kMaxLen = 8;
  std::vector<std::string> all;
  std::vector<std::size_t> offset;  // first index of each length
  std::vector<std::size_t> pow3;

  AbcStrings() {
    std::size_t p = 1;
    for (int len = 0; len <= kMaxLen; ++len) {
      offset.push_back(all.size());
      pow3.push_back(p);
      for (std::size_t v = 0; v < p; ++v) {
        std::string s(static_cast<std::size_t>(len), 'a');
        std::size_t x = v;
        for (int k = len - 1; k >= 0; --k, x /= 3) s[static_cast<std::size_t>(k)] = static_cast<char>('a' + x % 3);
        all.push_back(std::move(s));
      }
      p *= 3;
    }
  }

  // Index of s without its first character.
  std::size_t tail(std::size_t idx, int len) const {
    const std::size_t v = idx - offset[static_cast<std::size_t>(len)];
    return offset[static_cast<std::size_t>(len - 1)] + v % pow3[static_cast<std::size_t>(len - 1)];
  }
};

int length_of(const AbcStrings& s, std::size_t idx) {
  int len = 0;
  while (len < AbcStrings::kMaxLen && idx >= s.offset[static_cast<std::size_t>(len + 1)]) ++len;
  return len;
}

Outcome levenshtein_exhaustive() {
  const auto t0 = Clock::now();
  const AbcStrings s;
  const std::size_t n = s.all.size();
  // The suffix recurrence d(a, b) = min(d(a', b) + 1, d(a, b') + 1,
  // d(a', b') + [a0 != b0]), memoized over every pair.
  std::vector<std::uint8_t> memo(n * n);
  std::vector<int> len(n);
  for (std::size_t i = 0; i < n; ++i) len[i] = length_of(s, i);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::uint8_t d;
      if (len[i] == 0) {
        d = static_cast<std::uint8_t>(len[j]);
      } else if (len[j] == 0) {
        d = static_cast<std::uint8_t>(len[i]);
      } else {
        const std::size_t ti = s.tail(i, len[i]), tj = s.tail(j, len[j]);
        const int cost = s.all[i][0] != s.all[j][0];
        d = static_cast<std::uint8_t>(std::min({memo[ti * n + j] + 1, memo[i * n + tj] + 1, memo[ti * n + tj] + cost}));
      }
      memo[i * n + j] = d;
    }
  }
  // The memo table itself agrees with the plain recursion on a sample.
  std::mt19937 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int k = 0; k < 300; ++k) {
    const std::size_t i = pick(rng), j = pick(rng);
    if (testing::naive_levenshtein(s.all[i], s.all[j]) != memo[i * n + j]) {
      return {false, "memo disagrees with plain recursion on " + s.all[i] + "/" + s.all[j]};
    }
  }
  std::size_t checked = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (merge::levenshtein(s.all[i], s.all[j]) != memo[i * n + j]) {
        return {false, "mismatch on '" + s.all[i] + "' / '" + s.all[j] + "'"};
      }
      ++checked;
    }
  }
  const double secs = since(t0);
  return {secs < 30.0, std::to_string(checked) + " pairs, " + fmt("%.1f s", secs)};
}

Outcome f1_rows() {
  struct Row {
    double p, r, f1;
  };
  const Row rows[] = {{0.284, 0.266, 0.274}, {0.368, 0.343, 0.352}, {0.40, 0.375, 0.386},
                      {0.406, 0.378, 0.389}, {0.45, 0.42, 0.432}};
  double worst = 0.0;
  for (const auto& row : rows) worst = std::max(worst, std::abs(eval::f1_score(row.p, row.r) - row.f1));
  return {worst <= 0.005, "max |f1 - published| = " + fmt("%.4f", worst)};
}

Outcome otsu_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> px(0, 255);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    Image img(16, 16, 1);
    // Alternate full-range noise with few-level images, where ties are common.
    const int levels = i % 2 ? 256 : 2 + i % 5;
    for (auto& p : img.data()) p = static_cast<std::uint8_t>(levels == 256 ? px(rng) : px(rng) % levels * 40);
    mismatches += imaging::otsu_threshold(img) != testing::exhaustive_otsu(img);
  }
  const double secs = since(t0);
  return {mismatches == 0 && secs < 10.0, std::to_string(mismatches) + " mismatches in 1000 images, " + fmt("%.2f s", secs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome synthgen_contract() {
  const synth::Assets assets{fonts::FontSet::bundled(), synth::BackgroundPool::procedural()};
  const synth::WordList words{"breaking", "news", "storm", "coast", "options", "today", "people", "what's", "2018", "dogs"};
  proc::TempDir a("overlayx-acc"), b("overlayx-acc");
  synth::generate_dataset(words, assets, 100, 42, a.path());
  synth::generate_dataset(words, assets, 100, 42, b.path());
  std::size_t jpegs = 0, wrong_size = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(a.path() / "images")) {
    if (e.path().extension() != ".jpg") continue;
    ++jpegs;
    const Image img = codec::read_image(e.path());
    wrong_size += img.width() != synth::kSampleWidth || img.height() != synth::kSampleHeight;
    differ += slurp(e.path()) != slurp(b.path() / "images" / e.path().filename());
  }
  differ += slurp(a.path() / "manifest.jsonl") != slurp(b.path() / "manifest.jsonl");
  std::ostringstream d;
  d << jpegs << " JPEGs, " << wrong_size << " not 100x32, " << differ << " differing files";
  return {jpegs == 1000 && wrong_size == 0 && differ == 0, d.str()};
}

Outcome merge_fixture() {
  const std::vector<merge::TimedOverlay> in{{"we have", 1.0, 0}, {"we have many", 2.0, 1}, {"we have many options", 3.0, 2}};
  const auto out = merge::merge_overlays(in, 0.5);
  const bool ok = out.size() == 1 && out[0] == in[2];
  return {ok, std::to_string(out.size()) + " overlay(s), last = '" + (out.empty() ? "" : out.back().text) + "'"};
}

Outcome end_to_end() {
  const auto t0 = Clock::now();
  const auto fonts = fonts::FontSet::bundled();
  const auto set = testing::caption_frames(fonts);
  pipeline::PipelineConfig cfg;
  auto backends = pipeline::make_backends(cfg);
  const auto r = pipeline::evaluate_frames(set.frames, backends, cfg, set.truth);
  const double secs = since(t0);
  const bool ok = r.frames.size() == 10 && r.aggregate.f1 >= 0.9 && r.aggregate.similarity >= 0.9 && secs < 60.0;
  return {ok, "F1 " + fmt("%.3f", r.aggregate.f1) + ", similarity " + fmt("%.3f", r.aggregate.similarity) + ", " +
                  fmt("%.1f s", secs)};
}

Outcome nms_subsets() {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> pos(0, 24), size(4, 20), score(0, 5);
  std::size_t subsets = 0;
  for (int set = 0; set < 3; ++set) {
    std::vector<detection::TextBox> boxes;
    for (int i = 0; i < 12; ++i) boxes.push_back({pos(rng), pos(rng), size(rng), size(rng), score(rng) / 5.0});
    for (std::uint32_t mask = 0; mask < (1u << boxes.size()); ++mask) {
      std::vector<detection::TextBox> sub;
      for (std::size_t i = 0; i < boxes.size(); ++i)
        if (mask >> i & 1u) sub.push_back(boxes[i]);
      const auto kept = detection::nms(sub, detection::kDefaultNmsIou);
      const auto ref = testing::brute_force_nms(sub, detection::kDefaultNmsIou);
      bool same = kept.size() == ref.size();
      for (std::size_t k = 0; same && k < ref.size(); ++k) same = kept[k] == sub[ref[k]];
      if (!same) return {false, "mismatch on set " + std::to_string(set) + " subset mask " + std::to_string(mask)};
      ++subsets;
    }
  }
  return {true, std::to_string(subsets) + " subsets of 3 random 12-box sets"};
}

Outcome determinism() {
  const auto fonts = fonts::FontSet::bundled();
  proc::TempDir dir("overlayx-acc");
  testing::write_frames(testing::caption_frames(fonts).frames, dir.path() / "frames");
  std::vector<std::string> outputs;
  for (int workers : {1, 1, 2, 4}) {
    pipeline::PipelineConfig cfg;
    cfg.source = frames::ImageDir{dir.path() / "frames", 1.0};
    cfg.workers = workers;
    cfg.output = dir.path() / ("out_" + std::to_string(outputs.size()) + ".json");
    pipeline::run_pipeline(cfg);
    outputs.push_back(slurp(cfg.output));
  }
  bool same = !outputs[0].empty();
  for (const auto& o : outputs) same = same && o == outputs[0];
  return {same, "4 runs (workers 1, 1, 2, 4), " + std::to_string(outputs[0].size()) + " bytes each"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"levenshtein-oracle-exhaustive", levenshtein_exhaustive},
      {"f1-formula-regression", f1_rows},
      {"otsu-exhaustive-equivalence", otsu_equivalence},
      {"synthgen-contract", synthgen_contract},
      {"merge-progressive-fixture", merge_fixture},
      {"end-to-end-fixture", end_to_end},
      {"nms-brute-force-subsets", nms_subsets},
      {"transcript-determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << o.detail << ")" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
