#include "overlayx/overlay_merge.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>

#include "overlayx/charset.hpp"
#include "overlayx/error.hpp"

namespace overlayx::merge {

std::uint32_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  constexpr std::size_t kStackColumns = 64;
  std::array<std::uint32_t, 2 * (kStackColumns + 1)> small;
  std::vector<std::uint32_t> heap;
  std::uint32_t* prev = small.data();
  if (b.size() > kStackColumns) {
    heap.resize(2 * (b.size() + 1));
    prev = heap.data();
  }
  std::uint32_t* cur = prev + b.size() + 1;
  std::iota(prev, prev + b.size() + 1, 0u);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::uint32_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double normalized_distance(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

std::vector<TimedOverlay> merge_overlays(std::span<const TimedOverlay> overlays, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("merge threshold must lie in (0, 1]");
  }
  std::vector<TimedOverlay> newest_first(overlays.begin(), overlays.end());
  std::stable_sort(newest_first.begin(), newest_first.end(),
                   [](const TimedOverlay& a, const TimedOverlay& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp > b.timestamp;
                     return a.frame_index > b.frame_index;
                   });

  std::vector<bool> dropped(newest_first.size(), false);
  for (std::size_t i = 0; i + 1 < newest_first.size(); ++i) {
    const TimedOverlay& later = newest_first[i];
    const TimedOverlay& earlier = newest_first[i + 1];
    if (normalized_distance(later.text, earlier.text) < threshold) {
      // Shorter one goes; on a tie the earlier one does.
      if (later.text.size() < earlier.text.size()) {
        dropped[i] = true;
      } else {
        dropped[i + 1] = true;
      }
    }
  }

  std::vector<TimedOverlay> survivors;
  for (std::size_t i = newest_first.size(); i-- > 0;) {
    if (!dropped[i]) survivors.push_back(newest_first[i]);
  }
  return survivors;
}

Dictionary::Dictionary(const std::vector<std::string>& words) {
  for (const auto& raw : words) {
    std::string w;
    w.reserve(raw.size());
    for (char c : raw) {
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
      w.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    }
    if (w.empty() || !set_.insert(w).second) continue;
    if (by_length_.size() <= w.size()) by_length_.resize(w.size() + 1);
    by_length_[w.size()].push_back(w);
  }
  for (auto& bucket : by_length_) std::sort(bucket.begin(), bucket.end());
}

Dictionary Dictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open dictionary " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) words.push_back(line);
  return Dictionary(words);
}

const std::vector<std::string>& Dictionary::words_of_length(std::size_t len) const {
  static const std::vector<std::string> none;
  return len < by_length_.size() ? by_length_[len] : none;
}

namespace {

bool has_letter(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

std::string correct_token(const std::string& token, const Dictionary& dict, std::uint32_t max_dist) {
  if (!has_letter(token) || dict.contains(token)) return token;

  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && Charset::is_mark(token[b])) ++b;
  while (e > b && Charset::is_mark(token[e - 1])) --e;
  const std::string core = token.substr(b, e - b);
  if (dict.contains(core)) return token;

  std::uint32_t best = max_dist + 1;
  const std::string* best_word = nullptr;
  bool unique = false;
  const std::size_t lo = core.size() > max_dist ? core.size() - max_dist : 0;
  for (std::size_t len = lo; len <= core.size() + max_dist; ++len) {
    for (const auto& w : dict.words_of_length(len)) {
      const std::uint32_t d = levenshtein(core, w);
      if (d < best) {
        best = d;
        best_word = &w;
        unique = true;
      } else if (d == best) {
        unique = false;
      }
    }
  }
  if (best_word == nullptr || !unique) return token;
  return token.substr(0, b) + *best_word + token.substr(e);
}

}  // namespace

std::string autocorrect(std::string_view text, const Dictionary& dict, std::uint32_t max_dist) {
  std::istringstream words{std::string(text)};
  std::string token;
  std::string out;
  while (words >> token) {
    if (!out.empty()) out.push_back(' ');
    out += correct_token(token, dict, max_dist);
  }
  return out;
}

}  // namespace overlayx::merge
