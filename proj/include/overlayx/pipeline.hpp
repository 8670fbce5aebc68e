#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "overlayx/detection.hpp"
#include "overlayx/evaluation.hpp"
#include "overlayx/frames.hpp"
#include "overlayx/imaging.hpp"
#include "overlayx/overlay_merge.hpp"
#include "overlayx/recognition.hpp"
#include "overlayx/synthgen.hpp"

namespace overlayx::pipeline {

inline constexpr std::string_view kVersion = "0.1.0";

// kind "builtin" (detector), "template" (recognizer) or "external", which
// needs a command line.
struct BackendSpec {
  std::string kind;
  std::string command;
  bool single_flight = false;
};

struct PipelineConfig {
  frames::FrameSource source = frames::ImageDir{};
  imaging::PreprocessMethod preprocess = imaging::PreprocessMethod::None;
  BackendSpec detector{"builtin", "", false};
  BackendSpec recognizer{"template", "", false};
  std::filesystem::path fonts_dir;  // glyph atlas fonts; empty = bundled
  double merge_threshold = merge::kDefaultMergeThreshold;
  double nms_iou = detection::kDefaultNmsIou;
  int min_box_height = detection::kDefaultMinBoxHeight;
  std::optional<std::filesystem::path> dictionary;
  std::filesystem::path output;
  int workers = 0;  // 0 = one per logical CPU
  bool dataset_filter = false;  // eval: ignore words shorter than 3 characters

  // Throws ConfigError describing the first problem found.
  void validate() const;

  // FNV-1a over the canonical JSON form, leaving out `workers` and `output`,
  // which do not affect results.
  std::string hash() const;
};

// JSON object with the keys of PipelineConfig: "input", "source"
// ("video" | "images"), "fps", "preprocess", "detector" and "recognizer"
// ({kind, command, single_flight}), "fonts_dir", "merge_threshold",
// "nms_iou", "min_box_height", "dictionary", "output", "workers",
// "dataset_filter". Missing keys keep their defaults; unknown keys are an
// error.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

struct Backends {
  std::unique_ptr<detection::DetectorBackend> detector;
  std::unique_ptr<recognition::RecognizerBackend> recognizer;
};

// Throws ConfigError for unknown kinds or missing commands.
Backends make_backends(const PipelineConfig& cfg);

struct FrameAnalysis {
  std::uint32_t frame_index = 0;
  double timestamp = 0.0;
  std::vector<detection::TextBox> boxes;  // reading order
  std::vector<std::string> words;         // one per box, possibly empty
  std::string text;                       // non-empty words joined by single spaces
  std::uint32_t word_failures = 0;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  std::vector<StageTiming> timings;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
  std::uint32_t word_failures = 0;
  std::size_t frames = 0;
};

nlohmann::json to_json(const RunReport& report);

struct TranscriptEntry {
  double timestamp = 0.0;
  std::string text;
  std::uint32_t frame_index = 0;

  bool operator==(const TranscriptEntry&) const = default;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;  // ascending time
  std::string config_hash;
  std::uint32_t word_failures = 0;
  RunReport report;  // not part of the serialized transcript
};

// Entries, config hash, version and failure count. Timings are left out so
// identical runs serialize identically.
std::string transcript_json(const Transcript& t);

// Per frame: detect, filter_boxes, nms, reading order, crop, preprocess the
// crop, normalize to the recognizer's height, recognize. Frames run on a
// pool of cfg.workers threads; calls into single-flight backends are
// serialized. A failed word becomes "" and is counted; any other failure
// throws StageError naming the stage and frame. Results are in frame order.
std::vector<FrameAnalysis> analyze_frames(std::span<const frames::KeyFrame> frames, Backends& backends,
                                          const PipelineConfig& cfg);

// analyze_frames, then merge_overlays over the non-empty frame texts and
// autocorrect with the configured dictionary.
Transcript transcribe(std::span<const frames::KeyFrame> frames, Backends& backends, const PipelineConfig& cfg);

// Whole run from config: backends, frame extraction, transcribe, and (when
// cfg.output is set) the transcript JSON plus <output>.report.json.
Transcript run_pipeline(const PipelineConfig& cfg);

struct GroundTruthFrame {
  std::uint32_t frame_index = 0;
  std::vector<synth::GroundTruthBox> boxes;
};

using GroundTruth = std::map<std::uint32_t, GroundTruthFrame>;

// A JSON array of frames or one frame object per line:
// {"frame_index": n, "boxes": [{"x", "y", "w", "h", "text"}]}.
GroundTruth parse_ground_truth(std::string_view text);
GroundTruth load_ground_truth(const std::filesystem::path& path);
nlohmann::json to_json(const GroundTruthFrame& frame);

struct EvalResult {
  std::vector<eval::FrameScore> frames;
  eval::EvalReport aggregate;
  std::vector<std::string> warnings;
};

// Scores each frame's autocorrected text against its ground-truth words
// joined in reading order; frames without ground truth are skipped with a
// warning. The aggregate is micro-averaged.
EvalResult evaluate_frames(std::span<const frames::KeyFrame> frames, Backends& backends, const PipelineConfig& cfg,
                           const GroundTruth& truth);
EvalResult run_eval(const PipelineConfig& cfg, const GroundTruth& truth);

}  // namespace overlayx::pipeline
