#include "overlayx/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "overlayx/charset.hpp"
#include "overlayx/error.hpp"
#include "overlayx/overlay_merge.hpp"

namespace overlayx::eval {

void WordMultiset::add(const std::string& word, std::uint32_t n) {
  if (n == 0) return;
  counts_[word] += n;
  total_ += n;
}

std::uint32_t WordMultiset::count(const std::string& word) const {
  const auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

WordMultiset tokenize_words(std::string_view text, bool dataset_filter) {
  const Charset& cs = Charset::standard();
  WordMultiset out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string tok = cs.clean_token(text.substr(i, j - i));
      if (!tok.empty() && (!dataset_filter || tok.size() >= kMinLabelLength)) out.add(tok);
    }
    i = j;
  }
  return out;
}

std::uint64_t multiset_intersection(const WordMultiset& a, const WordMultiset& b) {
  const auto& small = a.counts().size() <= b.counts().size() ? a : b;
  const auto& large = &small == &a ? b : a;
  std::uint64_t n = 0;
  for (const auto& [word, count] : small.counts()) n += std::min(count, large.count(word));
  return n;
}

double f1_score(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

namespace {

void finish(EvalReport& r) {
  if (r.label_count == 0 && r.prediction_count == 0) {
    r.precision = r.recall = r.f1 = 1.0;
  } else {
    const double inter = static_cast<double>(r.intersection);
    r.precision = r.prediction_count == 0 ? 0.0 : inter / static_cast<double>(r.prediction_count);
    r.recall = r.label_count == 0 ? 0.0 : inter / static_cast<double>(r.label_count);
    r.f1 = f1_score(r.precision, r.recall);
  }
  r.similarity = r.longest == 0 ? 1.0 : 1.0 - static_cast<double>(r.edit_distance) / static_cast<double>(r.longest);
}

}  // namespace

EvalReport score(const WordMultiset& labels, const WordMultiset& preds, std::string_view label_text,
                 std::string_view pred_text) {
  EvalReport r;
  r.label_count = labels.total();
  r.prediction_count = preds.total();
  r.intersection = multiset_intersection(labels, preds);
  r.edit_distance = merge::levenshtein(label_text, pred_text);
  r.longest = std::max(label_text.size(), pred_text.size());
  finish(r);
  return r;
}

EvalReport score_texts(std::string_view label_text, std::string_view pred_text, bool dataset_filter) {
  return score(tokenize_words(label_text, dataset_filter), tokenize_words(pred_text, dataset_filter), label_text,
               pred_text);
}

EvalReport aggregate(std::span<const EvalReport> reports) {
  EvalReport total;
  for (const auto& r : reports) {
    total.label_count += r.label_count;
    total.prediction_count += r.prediction_count;
    total.intersection += r.intersection;
    total.edit_distance += r.edit_distance;
    total.longest += r.longest;
  }
  finish(total);
  return total;
}

std::vector<LabeledCrop> apply_dataset_filters(std::span<const Image> crops, std::span<const std::string> labels) {
  if (crops.size() != labels.size()) {
    throw InvalidArgument("dataset filter: " + std::to_string(crops.size()) + " crops but " +
                          std::to_string(labels.size()) + " labels");
  }
  std::vector<LabeledCrop> out;
  for (std::size_t i = 0; i < crops.size(); ++i) {
    if (crops[i].height() < kMinCropHeight || labels[i].size() < kMinLabelLength) continue;
    out.push_back({crops[i], labels[i]});
  }
  return out;
}

nlohmann::json to_json(const EvalReport& r) {
  return {{"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"similarity", r.similarity},
          {"labels", r.label_count},
          {"predictions", r.prediction_count},
          {"intersection", r.intersection}};
}

nlohmann::json to_json(std::span<const FrameScore> frames, const EvalReport& total) {
  nlohmann::json per_frame = nlohmann::json::array();
  for (const auto& f : frames) {
    nlohmann::json j = to_json(f.report);
    j["frame_index"] = f.frame_index;
    per_frame.push_back(std::move(j));
  }
  return {{"frames", std::move(per_frame)}, {"aggregate", to_json(total)}};
}

std::string format_table(std::span<const FrameScore> frames, const EvalReport& total) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-9s %9s %9s %9s %10s %7s %7s %7s\n", "frame", "precision", "recall", "f1",
                "similarity", "labels", "preds", "match");
  os << line;
  auto row = [&](const std::string& name, const EvalReport& r) {
    std::snprintf(line, sizeof line, "%-9s %9.4f %9.4f %9.4f %10.4f %7llu %7llu %7llu\n", name.c_str(), r.precision,
                  r.recall, r.f1, r.similarity, static_cast<unsigned long long>(r.label_count),
                  static_cast<unsigned long long>(r.prediction_count),
                  static_cast<unsigned long long>(r.intersection));
    os << line;
  };
  for (const auto& f : frames) row(std::to_string(f.frame_index), f.report);
  row("total", total);
  return os.str();
}

}  // namespace overlayx::eval
