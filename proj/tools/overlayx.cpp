#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "overlayx/codec.hpp"
#include "overlayx/error.hpp"
#include "overlayx/evaluation.hpp"
#include "overlayx/imaging.hpp"
#include "overlayx/pipeline.hpp"
#include "overlayx/synthgen.hpp"

namespace fs = std::filesystem;
using namespace overlayx;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitStage = 2;

// Command-line values that override the config file when given.
struct Overrides {
  std::string config;
  std::optional<std::string> input;
  std::optional<std::string> source;
  std::optional<double> fps;
  std::optional<std::string> preprocess;
  std::optional<std::string> detector;
  std::optional<std::string> detector_cmd;
  std::optional<std::string> recognizer;
  std::optional<std::string> recognizer_cmd;
  std::optional<std::string> fonts_dir;
  std::optional<double> merge_threshold;
  std::optional<double> nms_iou;
  std::optional<int> min_box_height;
  std::optional<std::string> dictionary;
  std::optional<std::string> output;
  std::optional<int> workers;
};

void add_pipeline_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON config file");
  cmd->add_option("-i,--input", o.input, "Video file or frame directory");
  cmd->add_option("--source", o.source, "Input kind")->check(CLI::IsMember({"video", "images"}));
  cmd->add_option("--fps", o.fps, "Frame rate for a frame directory");
  cmd->add_option("--preprocess", o.preprocess, "none, otsu, blur-otsu, blur-otsu-open or max-rgb");
  cmd->add_option("--detector", o.detector, "builtin or external");
  cmd->add_option("--detector-cmd", o.detector_cmd, "External detector command line");
  cmd->add_option("--recognizer", o.recognizer, "template or external");
  cmd->add_option("--recognizer-cmd", o.recognizer_cmd, "External recognizer command line");
  cmd->add_option("--fonts-dir", o.fonts_dir, "Fonts for the template recognizer");
  cmd->add_option("--merge-threshold", o.merge_threshold, "Normalized distance below which overlays merge");
  cmd->add_option("--nms-iou", o.nms_iou, "IoU threshold for non-maximum suppression");
  cmd->add_option("--min-box-height", o.min_box_height, "Smallest word box height kept");
  cmd->add_option("--dictionary", o.dictionary, "Autocorrect word list, one word per line");
  cmd->add_option("-o,--output", o.output, "Output file");
  cmd->add_option("-j,--workers", o.workers, "Worker threads (0 = all CPUs)");
}

pipeline::PipelineConfig resolve_config(const Overrides& o) {
  nlohmann::json j = nlohmann::json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot read config " + o.config);
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(o.config + ": " + e.what());
    }
  }
  if (o.input) j["input"] = *o.input;
  if (o.source) j["source"] = *o.source;
  if (o.fps) j["fps"] = *o.fps;
  if (o.preprocess) j["preprocess"] = *o.preprocess;
  auto backend = [&](const char* key, const std::optional<std::string>& kind, const std::optional<std::string>& cmd) {
    if (!kind && !cmd) return;
    nlohmann::json spec = j.contains(key) && j[key].is_object() ? j[key] : nlohmann::json::object();
    if (j.contains(key) && j[key].is_string()) spec["kind"] = j[key];
    if (kind) spec["kind"] = *kind;
    if (cmd) {
      spec["command"] = *cmd;
      if (!kind && !spec.contains("kind")) spec["kind"] = "external";
    }
    j[key] = spec;
  };
  backend("detector", o.detector, o.detector_cmd);
  backend("recognizer", o.recognizer, o.recognizer_cmd);
  if (o.fonts_dir) j["fonts_dir"] = *o.fonts_dir;
  if (o.merge_threshold) j["merge_threshold"] = *o.merge_threshold;
  if (o.nms_iou) j["nms_iou"] = *o.nms_iou;
  if (o.min_box_height) j["min_box_height"] = *o.min_box_height;
  if (o.dictionary) j["dictionary"] = *o.dictionary;
  if (o.output) j["output"] = *o.output;
  if (o.workers) j["workers"] = *o.workers;

  pipeline::PipelineConfig cfg = pipeline::config_from_json(j);
  cfg.validate();
  const fs::path input = std::visit([](const auto& s) { return s.path; }, cfg.source);
  if (input.empty()) throw ConfigError("no input given (--input or \"input\" in the config)");
  if (!fs::exists(input)) throw ConfigError("input not found: " + input.string());
  if (cfg.dictionary && !fs::exists(*cfg.dictionary)) {
    throw ConfigError("dictionary not found: " + cfg.dictionary->string());
  }
  return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int run_extract(const Overrides& o) {
  const pipeline::PipelineConfig cfg = resolve_config(o);
  const pipeline::Transcript t = pipeline::run_pipeline(cfg);
  print_warnings(t.report.warnings);
  if (cfg.output.empty()) std::cout << pipeline::transcript_json(t);
  return 0;
}

int run_eval(const Overrides& o, const std::string& truth_path, const std::string& json_out, bool dataset_filter) {
  pipeline::PipelineConfig cfg = resolve_config(o);
  if (dataset_filter) cfg.dataset_filter = true;
  pipeline::GroundTruth truth;
  try {
    truth = pipeline::load_ground_truth(truth_path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const pipeline::EvalResult r = pipeline::run_eval(cfg, truth);
  print_warnings(r.warnings);
  std::cout << eval::format_table(r.frames, r.aggregate);
  const std::string out = !json_out.empty() ? json_out : cfg.output.string();
  if (!out.empty()) {
    std::ofstream f(out, std::ios::trunc);
    if (!f) throw Error("cannot write " + out);
    f << eval::to_json(r.frames, r.aggregate).dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extract textual overlays from video keyframes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pipeline::kVersion));

  Overrides extract_opts;
  auto* extract = app.add_subcommand("extract", "Run the pipeline and write a transcript");
  add_pipeline_options(extract, extract_opts);

  Overrides eval_opts;
  std::string truth_path, eval_json;
  bool dataset_filter = false;
  auto* evalc = app.add_subcommand("eval", "Score per-frame output against ground truth");
  add_pipeline_options(evalc, eval_opts);
  evalc->add_option("-g,--ground-truth", truth_path, "Ground truth (JSON array or JSON lines)")->required();
  evalc->add_option("--json", eval_json, "Also write the report as JSON");
  evalc->add_flag("--dataset-filter", dataset_filter, "Ignore words shorter than 3 characters");

  std::vector<std::string> words_files;
  std::string freq_file, synth_out, synth_fonts, synth_backgrounds;
  std::uint32_t samples_per_word = 100;
  std::uint64_t seed = 1;
  auto* synthc = app.add_subcommand("synthgen", "Generate a synthetic word-image dataset");
  synthc->add_option("--words", words_files, "Transcript text files")->check(CLI::ExistingFile);
  synthc->add_option("--freq", freq_file, "Word frequency list")->check(CLI::ExistingFile);
  synthc->add_option("--out", synth_out, "Output directory")->required();
  synthc->add_option("--samples-per-word", samples_per_word, "Images per word");
  synthc->add_option("--seed", seed, "Master seed");
  synthc->add_option("--fonts-dir", synth_fonts, "Fonts (default: bundled)")->check(CLI::ExistingDirectory);
  synthc->add_option("--backgrounds-dir", synth_backgrounds, "Background crops (default: procedural)")
      ->check(CLI::ExistingDirectory);

  std::string pre_in, pre_out, pre_method = "otsu";
  auto* pre = app.add_subcommand("preprocess", "Apply one preprocessing variant to an image");
  pre->add_option("input", pre_in, "Input image")->required()->check(CLI::ExistingFile);
  pre->add_option("output", pre_out, "Output image (.png or .jpg)")->required();
  pre->add_option("-m,--method", pre_method, "none, otsu, blur-otsu, blur-otsu-open or max-rgb");

  std::vector<std::string> captions;
  std::string fixture_out;
  int fixture_size = 48;
  auto* fixture = app.add_subcommand("fixture", "Render caption frames with ground truth");
  fixture->add_option("--caption", captions, "One frame per caption; '|' starts a new line")->required();
  fixture->add_option("--out", fixture_out, "Output directory")->required();
  fixture->add_option("--size", fixture_size, "Font size in pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*extract) return run_extract(extract_opts);
    if (*evalc) return run_eval(eval_opts, truth_path, eval_json, dataset_filter);
    if (*synthc) {
      synth::Assets assets;
      try {
        assets.fonts = synth_fonts.empty() ? fonts::FontSet::bundled() : fonts::FontSet::load_dir(synth_fonts);
        assets.backgrounds = synth_backgrounds.empty() ? synth::BackgroundPool::procedural()
                                                       : synth::BackgroundPool::load_dir(synth_backgrounds);
        if (assets.backgrounds.empty()) throw ConfigError("no backgrounds in " + synth_backgrounds);
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
      std::vector<fs::path> transcripts(words_files.begin(), words_files.end());
      synth::WordList words;
      try {
        words = synth::build_wordlist(transcripts, freq_file);
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
      const auto manifest = synth::generate_dataset(words, assets, samples_per_word, seed, synth_out);
      std::cout << "wrote " << manifest.size() << " samples for " << words.size() << " words to " << synth_out
                << "\n";
      return 0;
    }
    if (*pre) {
      imaging::PreprocessMethod method;
      try {
        method = imaging::parse_preprocess_method(pre_method);
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
      codec::write_image(pre_out, imaging::preprocess(codec::read_image(pre_in), method));
      return 0;
    }
    if (*fixture) {
      const fonts::FontSet fonts = fonts::FontSet::bundled();
      synth::FrameStyle style;
      style.width = 960;
      style.size = fixture_size;
      fs::create_directories(fixture_out);
      std::ofstream truth(fs::path(fixture_out) / "ground_truth.jsonl", std::ios::trunc);
      for (std::size_t i = 0; i < captions.size(); ++i) {
        std::vector<std::string> lines;
        std::stringstream ss(captions[i]);
        for (std::string line; std::getline(ss, line, '|');) lines.push_back(line);
        const auto layout = synth::layout_caption(lines, fonts, style, 24, 40);
        const auto fx = synth::generate_frame_fixture(layout, fonts, style, i);
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03zu.png", i);
        codec::write_image(fs::path(fixture_out) / name, fx.frame);
        truth << pipeline::to_json(pipeline::GroundTruthFrame{static_cast<std::uint32_t>(i), fx.boxes}).dump()
              << "\n";
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return 0;
}
