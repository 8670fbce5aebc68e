#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace overlayx::merge {

// Text recognized on one keyframe: its words joined by single spaces in
// reading order.
struct TimedOverlay {
  std::string text;
  double timestamp = 0.0;
  std::uint32_t frame_index = 0;

  bool operator==(const TimedOverlay&) const = default;
};

// Unit-cost insert/delete/substitute edit distance over bytes.
std::uint32_t levenshtein(std::string_view a, std::string_view b);

// levenshtein / max(|a|, |b|); ("", "") -> 0.
double normalized_distance(std::string_view a, std::string_view b);

inline constexpr double kDefaultMergeThreshold = 0.5;

// Collapses overlays that grow across frames. Overlays are visited newest
// first; each consecutive pair of that ordering whose normalized distance is
// below `threshold` loses its shorter member (the earlier one on equal
// length). Pairs are taken from the full ordering, not from the survivors.
// Survivors come back oldest first. Throws InvalidArgument unless
// 0 < threshold <= 1.
std::vector<TimedOverlay> merge_overlays(std::span<const TimedOverlay> overlays,
                                         double threshold = kDefaultMergeThreshold);

class Dictionary {
 public:
  Dictionary() = default;
  // Words are lowercased; duplicates and blanks are dropped.
  explicit Dictionary(const std::vector<std::string>& words);

  // One word per line, UTF-8.
  static Dictionary load(const std::filesystem::path& path);

  bool contains(std::string_view word) const { return set_.contains(std::string(word)); }
  std::size_t size() const { return set_.size(); }
  bool empty() const { return set_.empty(); }

  // Words whose length is exactly `len`.
  const std::vector<std::string>& words_of_length(std::size_t len) const;

 private:
  std::unordered_set<std::string> set_;
  std::vector<std::vector<std::string>> by_length_;
};

// Per space-separated token: dictionary hits stay, otherwise the unique
// dictionary word at minimum distance <= max_dist replaces the token's core
// (leading/trailing marks are kept). Tokens with no letters, ties, and
// misses stay as they are.
std::string autocorrect(std::string_view text, const Dictionary& dict, std::uint32_t max_dist = 1);

}  // namespace overlayx::merge
