#include "overlayx/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>

#include <omp.h>

#include <nlohmann/json.hpp>

#include "overlayx/error.hpp"
#include "overlayx/subprocess.hpp"
#include "overlayx/template_recognizer.hpp"

namespace overlayx::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Records the wall time of one stage into a report.
class StageTimer {
 public:
  StageTimer(RunReport& report, std::string stage) : report_(report), stage_(std::move(stage)), t0_(Clock::now()) {}
  ~StageTimer() { report_.timings.push_back({stage_, seconds_since(t0_)}); }

 private:
  RunReport& report_;
  std::string stage_;
  Clock::time_point t0_;
};

BackendSpec spec_from_json(const json& j, const char* what) {
  if (j.is_string()) return {j.get<std::string>(), "", false};
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a string or an object");
  BackendSpec s;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      s.kind = value.get<std::string>();
    } else if (key == "command") {
      s.command = value.get<std::string>();
    } else if (key == "single_flight") {
      s.single_flight = value.get<bool>();
    } else {
      throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
    }
  }
  return s;
}

json spec_to_json(const BackendSpec& s) {
  return {{"kind", s.kind}, {"command", s.command}, {"single_flight", s.single_flight}};
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (w.empty()) continue;
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

int worker_count(const PipelineConfig& cfg) { return cfg.workers > 0 ? cfg.workers : omp_get_num_procs(); }

// Runs `fn`, holding `m` when the backend asked for single-flight calls.
template <typename Fn>
auto call_backend(bool single_flight, std::mutex& m, Fn&& fn) {
  if (!single_flight) return fn();
  std::lock_guard lock(m);
  return fn();
}

FrameAnalysis analyze_one(const frames::KeyFrame& frame, Backends& backends, const PipelineConfig& cfg,
                          std::mutex& detect_mutex, std::mutex& recognize_mutex) {
  FrameAnalysis fa;
  fa.frame_index = frame.index;
  fa.timestamp = frame.timestamp;

  std::vector<detection::TextBox> boxes;
  try {
    auto& det = *backends.detector;
    boxes = call_backend(det.single_flight(), detect_mutex, [&] { return det.detect(frame.image); });
    boxes = detection::filter_boxes(boxes, cfg.min_box_height);
    boxes = detection::nms(boxes, cfg.nms_iou);
    boxes = detection::reading_order(boxes);
  } catch (const std::exception& e) {
    throw StageError("detect", frame.index, e.what());
  }
  fa.boxes = boxes;

  auto& rec = *backends.recognizer;
  std::vector<recognition::WordImage> words;
  words.reserve(boxes.size());
  try {
    for (const auto& b : boxes) {
      Image word = imaging::preprocess(crop(frame.image, intersect(b.rect(), frame.image.bounds())), cfg.preprocess);
      if (word.channels() == 3) word = imaging::to_grayscale(word);
      words.push_back({recognition::normalize_height(word, rec.model_height()), b, frame.index});
    }
  } catch (const std::exception& e) {
    throw StageError("preprocess", frame.index, e.what());
  }

  fa.words.assign(words.size(), std::string());
  if (!words.empty()) {
    try {
      const auto results =
          call_backend(rec.single_flight(), recognize_mutex, [&] { return recognition::recognize_batch(words, rec); });
      for (std::size_t i = 0; i < results.size(); ++i) fa.words[i] = results[i].text;
    } catch (const BackendError&) {
      // Find out which words fail by retrying them one at a time.
      for (std::size_t i = 0; i < words.size(); ++i) {
        try {
          fa.words[i] = call_backend(rec.single_flight(), recognize_mutex,
                                     [&] { return recognition::recognize(words[i], rec); })
                            .text;
        } catch (const BackendError&) {
          ++fa.word_failures;
        }
      }
    } catch (const std::exception& e) {
      throw StageError("recognize", frame.index, e.what());
    }
  }
  fa.text = join_words(fa.words);
  return fa;
}

merge::Dictionary load_dictionary(const PipelineConfig& cfg) {
  if (!cfg.dictionary) return {};
  return merge::Dictionary::load(*cfg.dictionary);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(merge_threshold > 0.0 && merge_threshold <= 1.0)) throw ConfigError("merge_threshold must be in (0, 1]");
  if (!(nms_iou > 0.0 && nms_iou <= 1.0)) throw ConfigError("nms_iou must be in (0, 1]");
  if (min_box_height < 1) throw ConfigError("min_box_height must be at least 1");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (const auto* d = std::get_if<frames::ImageDir>(&source); d && !(d->fps > 0.0)) {
    throw ConfigError("fps must be positive");
  }
  if (detector.kind != "builtin" && detector.kind != "external") {
    throw ConfigError("unknown detector kind '" + detector.kind + "'");
  }
  if (recognizer.kind != "template" && recognizer.kind != "external") {
    throw ConfigError("unknown recognizer kind '" + recognizer.kind + "'");
  }
  if (detector.kind == "external" && proc::split_command(detector.command).empty()) {
    throw ConfigError("external detector needs a command");
  }
  if (recognizer.kind == "external" && proc::split_command(recognizer.command).empty()) {
    throw ConfigError("external recognizer needs a command");
  }
}

json to_json(const PipelineConfig& cfg) {
  json j;
  if (const auto* v = std::get_if<frames::VideoFile>(&cfg.source)) {
    j["source"] = "video";
    j["input"] = v->path.string();
  } else {
    const auto& d = std::get<frames::ImageDir>(cfg.source);
    j["source"] = "images";
    j["input"] = d.path.string();
    j["fps"] = d.fps;
  }
  j["preprocess"] = std::string(imaging::to_string(cfg.preprocess));
  j["detector"] = spec_to_json(cfg.detector);
  j["recognizer"] = spec_to_json(cfg.recognizer);
  j["fonts_dir"] = cfg.fonts_dir.string();
  j["merge_threshold"] = cfg.merge_threshold;
  j["nms_iou"] = cfg.nms_iou;
  j["min_box_height"] = cfg.min_box_height;
  j["dictionary"] = cfg.dictionary ? json(cfg.dictionary->string()) : json(nullptr);
  j["output"] = cfg.output.string();
  j["workers"] = cfg.workers;
  j["dataset_filter"] = cfg.dataset_filter;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig cfg;
  std::string source_kind = "images";
  std::string input;
  double fps = 1.0;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "source") {
        source_kind = value.get<std::string>();
      } else if (key == "input") {
        input = value.get<std::string>();
      } else if (key == "fps") {
        fps = value.get<double>();
      } else if (key == "preprocess") {
        cfg.preprocess = imaging::parse_preprocess_method(value.get<std::string>());
      } else if (key == "detector") {
        cfg.detector = spec_from_json(value, "detector");
      } else if (key == "recognizer") {
        cfg.recognizer = spec_from_json(value, "recognizer");
      } else if (key == "fonts_dir") {
        cfg.fonts_dir = value.get<std::string>();
      } else if (key == "merge_threshold") {
        cfg.merge_threshold = value.get<double>();
      } else if (key == "nms_iou") {
        cfg.nms_iou = value.get<double>();
      } else if (key == "min_box_height") {
        cfg.min_box_height = value.get<int>();
      } else if (key == "dictionary") {
        if (value.is_null() || (value.is_string() && value.get<std::string>().empty())) {
          cfg.dictionary.reset();
        } else {
          cfg.dictionary = value.get<std::string>();
        }
      } else if (key == "output") {
        cfg.output = value.get<std::string>();
      } else if (key == "workers") {
        cfg.workers = value.get<int>();
      } else if (key == "dataset_filter") {
        cfg.dataset_filter = value.get<bool>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (source_kind == "video") {
    cfg.source = frames::VideoFile{input};
  } else if (source_kind == "images") {
    cfg.source = frames::ImageDir{input, fps};
  } else {
    throw ConfigError("source must be \"video\" or \"images\"");
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string PipelineConfig::hash() const {
  json j = to_json(*this);
  j.erase("workers");
  j.erase("output");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Backends make_backends(const PipelineConfig& cfg) {
  cfg.validate();
  Backends b;
  if (cfg.detector.kind == "builtin") {
    b.detector = std::make_unique<detection::BuiltinDetector>();
  } else {
    b.detector =
        std::make_unique<detection::ExternalDetector>(proc::split_command(cfg.detector.command), cfg.detector.single_flight);
  }
  if (cfg.recognizer.kind == "template") {
    try {
      const fonts::FontSet fonts = cfg.fonts_dir.empty() ? fonts::FontSet::bundled() : fonts::FontSet::load_dir(cfg.fonts_dir);
      b.recognizer = std::make_unique<recognition::TemplateRecognizer>(
          std::make_shared<const recognition::GlyphAtlas>(recognition::GlyphAtlas::build(fonts)));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("template recognizer: ") + e.what());
    }
  } else {
    b.recognizer = std::make_unique<recognition::ExternalRecognizer>(proc::split_command(cfg.recognizer.command),
                                                                     cfg.recognizer.single_flight);
  }
  return b;
}

json to_json(const RunReport& r) {
  json timings = json::array();
  for (const auto& t : r.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  return {{"timings", timings},
          {"wall_seconds", r.wall_seconds},
          {"warnings", r.warnings},
          {"word_failures", r.word_failures},
          {"frames", r.frames}};
}

std::string transcript_json(const Transcript& t) {
  json entries = json::array();
  for (const auto& e : t.entries) {
    entries.push_back({{"timestamp", e.timestamp}, {"text", e.text}, {"frame_index", e.frame_index}});
  }
  const json j = {{"entries", entries},
                  {"metadata",
                   {{"config_hash", t.config_hash}, {"version", kVersion}, {"word_failures", t.word_failures}}}};
  return j.dump(2) + "\n";
}

std::vector<FrameAnalysis> analyze_frames(std::span<const frames::KeyFrame> frames, Backends& backends,
                                          const PipelineConfig& cfg) {
  if (!backends.detector || !backends.recognizer) throw ConfigError("pipeline backends are not set");
  std::vector<FrameAnalysis> out(frames.size());
  std::vector<std::exception_ptr> errors(frames.size());
  std::mutex detect_mutex, recognize_mutex;
  const long n = static_cast<long>(frames.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count(cfg))
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = analyze_one(frames[i], backends, cfg, detect_mutex, recognize_mutex);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // The earliest failing frame is reported, whatever the scheduling was.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Transcript transcribe(std::span<const frames::KeyFrame> frames, Backends& backends, const PipelineConfig& cfg) {
  Transcript t;
  t.config_hash = cfg.hash();
  t.report.frames = frames.size();

  std::vector<FrameAnalysis> analyses;
  {
    StageTimer timer(t.report, "analyze");
    analyses = analyze_frames(frames, backends, cfg);
  }
  std::vector<merge::TimedOverlay> overlays;
  for (const auto& a : analyses) {
    t.word_failures += a.word_failures;
    if (!a.text.empty()) overlays.push_back({a.text, a.timestamp, a.frame_index});
  }
  t.report.word_failures = t.word_failures;
  if (t.word_failures > 0) {
    t.report.warnings.push_back(std::to_string(t.word_failures) + " word(s) failed to recognize");
  }

  std::vector<merge::TimedOverlay> merged;
  {
    StageTimer timer(t.report, "merge");
    try {
      merged = merge::merge_overlays(overlays, cfg.merge_threshold);
    } catch (const std::exception& e) {
      throw StageError("merge", -1, e.what());
    }
  }
  {
    StageTimer timer(t.report, "autocorrect");
    merge::Dictionary dict;
    try {
      dict = load_dictionary(cfg);
    } catch (const std::exception& e) {
      throw StageError("autocorrect", -1, e.what());
    }
    for (const auto& o : merged) t.entries.push_back({o.timestamp, merge::autocorrect(o.text, dict), o.frame_index});
  }
  return t;
}

Transcript run_pipeline(const PipelineConfig& cfg) {
  const auto t0 = Clock::now();
  RunReport report;
  Backends backends;
  {
    StageTimer timer(report, "setup");
    backends = make_backends(cfg);
  }
  std::vector<frames::KeyFrame> keyframes;
  {
    StageTimer timer(report, "extract");
    try {
      keyframes = frames::load_frames(cfg.source, frames::CodecAdapterConfig::from_env(), &report.warnings);
    } catch (const std::exception& e) {
      throw StageError("extract", -1, e.what());
    }
  }
  Transcript t = transcribe(keyframes, backends, cfg);
  report.timings.insert(report.timings.end(), t.report.timings.begin(), t.report.timings.end());
  report.warnings.insert(report.warnings.end(), t.report.warnings.begin(), t.report.warnings.end());
  report.word_failures = t.report.word_failures;
  report.frames = t.report.frames;

  if (!cfg.output.empty()) {
    StageTimer timer(report, "write");
    try {
      write_text(cfg.output, transcript_json(t));
    } catch (const std::exception& e) {
      throw StageError("write", -1, e.what());
    }
  }
  report.wall_seconds = seconds_since(t0);
  if (!cfg.output.empty()) {
    fs::path report_path = cfg.output;
    report_path += ".report.json";
    write_text(report_path, to_json(report).dump(2) + "\n");
  }
  t.report = std::move(report);
  return t;
}

GroundTruth parse_ground_truth(std::string_view text) {
  auto frame_from = [](const json& j) {
    GroundTruthFrame f;
    f.frame_index = j.at("frame_index").get<std::uint32_t>();
    for (const auto& b : j.at("boxes")) {
      f.boxes.push_back({{b.at("x").get<int>(), b.at("y").get<int>(), b.at("w").get<int>(), b.at("h").get<int>()},
                         b.at("text").get<std::string>()});
    }
    return f;
  };
  GroundTruth truth;
  auto add = [&](const json& j) {
    GroundTruthFrame f = frame_from(j);
    const auto idx = f.frame_index;
    if (!truth.emplace(idx, std::move(f)).second) {
      throw InvalidArgument("duplicate ground truth for frame " + std::to_string(idx));
    }
  };
  try {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '[') {
      for (const auto& j : json::parse(text)) add(j);
    } else {
      std::istringstream in{std::string(text)};
      std::string line;
      while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        add(json::parse(line));
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad ground truth: ") + e.what());
  }
  return truth;
}

GroundTruth load_ground_truth(const fs::path& path) { return parse_ground_truth(read_text(path)); }

json to_json(const GroundTruthFrame& f) {
  json boxes = json::array();
  for (const auto& b : f.boxes) {
    boxes.push_back({{"x", b.box.x}, {"y", b.box.y}, {"w", b.box.w}, {"h", b.box.h}, {"text", b.text}});
  }
  return {{"frame_index", f.frame_index}, {"boxes", boxes}};
}

EvalResult evaluate_frames(std::span<const frames::KeyFrame> frames, Backends& backends, const PipelineConfig& cfg,
                           const GroundTruth& truth) {
  EvalResult result;
  std::vector<frames::KeyFrame> labelled;
  for (const auto& f : frames) {
    if (truth.contains(f.index)) {
      labelled.push_back(f);
    } else {
      result.warnings.push_back("no ground truth for frame " + std::to_string(f.index) + "; skipped");
    }
  }
  const auto analyses = analyze_frames(labelled, backends, cfg);
  const merge::Dictionary dict = load_dictionary(cfg);
  std::vector<eval::EvalReport> reports;
  for (const auto& a : analyses) {
    const auto& gt = truth.at(a.frame_index);
    std::vector<detection::TextBox> boxes;
    for (const auto& b : gt.boxes) boxes.push_back({b.box.x, b.box.y, b.box.w, b.box.h, 1.0});
    const auto ordered = detection::reading_order(boxes);
    // reading_order keeps box geometry, so texts are matched back by box.
    std::vector<std::string> label_words;
    std::vector<bool> used(gt.boxes.size(), false);
    for (const auto& ob : ordered) {
      for (std::size_t k = 0; k < gt.boxes.size(); ++k) {
        if (!used[k] && gt.boxes[k].box == ob.rect()) {
          used[k] = true;
          label_words.push_back(gt.boxes[k].text);
          break;
        }
      }
    }
    const std::string label_text = Charset::standard().restrict(join_words(label_words), true);
    const std::string pred_text = merge::autocorrect(a.text, dict);
    const eval::EvalReport r = eval::score_texts(label_text, pred_text, cfg.dataset_filter);
    reports.push_back(r);
    result.frames.push_back({a.frame_index, r});
  }
  result.aggregate = eval::aggregate(reports);
  return result;
}

EvalResult run_eval(const PipelineConfig& cfg, const GroundTruth& truth) {
  Backends backends = make_backends(cfg);
  std::vector<std::string> warnings;
  std::vector<frames::KeyFrame> keyframes;
  try {
    keyframes = frames::load_frames(cfg.source, frames::CodecAdapterConfig::from_env(), &warnings);
  } catch (const std::exception& e) {
    throw StageError("extract", -1, e.what());
  }
  EvalResult r = evaluate_frames(keyframes, backends, cfg, truth);
  warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
  r.warnings = std::move(warnings);
  return r;
}

}  // namespace overlayx::pipeline
