#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "overlayx/image.hpp"

namespace overlayx::eval {

// Word -> occurrence count. Counts are always >= 1.
class WordMultiset {
 public:
  WordMultiset() = default;

  void add(const std::string& word, std::uint32_t n = 1);
  std::uint32_t count(const std::string& word) const;
  // Sum of all counts.
  std::uint64_t total() const { return total_; }
  bool empty() const { return total_ == 0; }
  const std::map<std::string, std::uint32_t>& counts() const { return counts_; }

  bool operator==(const WordMultiset&) const = default;

 private:
  std::map<std::string, std::uint32_t> counts_;
  std::uint64_t total_ = 0;
};

// Whitespace split, then Charset::clean_token on each token (lowercase,
// out-of-charset bytes dropped, marks trimmed from the edges). Empty tokens
// vanish; with `dataset_filter` so do tokens shorter than 3 characters.
WordMultiset tokenize_words(std::string_view text, bool dataset_filter = false);

// Sum over words of min(a[w], b[w]).
std::uint64_t multiset_intersection(const WordMultiset& a, const WordMultiset& b);

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double similarity = 0.0;
  std::uint64_t label_count = 0;
  std::uint64_t prediction_count = 0;
  std::uint64_t intersection = 0;
  // Character edit distance between the texts and the longer text's length;
  // kept so reports can be pooled.
  std::uint64_t edit_distance = 0;
  std::uint64_t longest = 0;
};

// precision = |L n P| / |P|, recall = |L n P| / |L|, f1 their harmonic mean,
// similarity = 1 - levenshtein(label_text, pred_text) / max length.
// No predictions gives precision 0; no labels gives recall 0; neither gives
// 1 everywhere. f1 is 0 when precision + recall is 0.
EvalReport score(const WordMultiset& labels, const WordMultiset& preds, std::string_view label_text,
                 std::string_view pred_text);

// Tokenizes both texts and scores them.
EvalReport score_texts(std::string_view label_text, std::string_view pred_text, bool dataset_filter = false);

double f1_score(double precision, double recall);

// Micro average: counts and edit distances are summed before dividing.
EvalReport aggregate(std::span<const EvalReport> reports);

struct LabeledCrop {
  Image crop;
  std::string label;
};

// Drops pairs whose crop is under 20 rows or whose label has fewer than 3
// characters. Throws InvalidArgument when the lists differ in length.
std::vector<LabeledCrop> apply_dataset_filters(std::span<const Image> crops, std::span<const std::string> labels);

inline constexpr int kMinCropHeight = 20;
inline constexpr std::size_t kMinLabelLength = 3;

struct FrameScore {
  std::uint32_t frame_index = 0;
  EvalReport report;
};

nlohmann::json to_json(const EvalReport& r);
nlohmann::json to_json(std::span<const FrameScore> frames, const EvalReport& total);

// Aligned plain-text table, one row per frame plus the aggregate.
std::string format_table(std::span<const FrameScore> frames, const EvalReport& total);

}  // namespace overlayx::eval
