#include "overlayx/frames.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "overlayx/codec.hpp"
#include "overlayx/error.hpp"
#include "overlayx/subprocess.hpp"

namespace overlayx::frames {

namespace fs = std::filesystem;

namespace {

std::string replace_all(std::string s, std::string_view key, const std::string& value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size())) {
    s.replace(pos, key.size(), value);
  }
  return s;
}

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<fs::path> sorted_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

}  // namespace

std::vector<std::string> CodecAdapterConfig::default_args() {
  return {"-hide_banner", "-loglevel", "error", "-nostdin", "-i",      "{input}",   "-vf",
          std::string(kIframeFilter), "-vsync", "passthrough", "-f", "image2", "{outdir}/frame_%06d.png"};
}

CodecAdapterConfig CodecAdapterConfig::from_env() {
  CodecAdapterConfig cfg;
  if (const char* env = std::getenv("OVERLAYX_FFMPEG"); env && *env) {
    cfg.program = proc::split_command(env);
  }
  if (cfg.program.empty()) cfg.program = {"ffmpeg"};
  cfg.args = default_args();
  return cfg;
}

std::vector<double> parse_timestamp_manifest(std::string_view text) {
  std::vector<double> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = trim(raw);
    if (line.empty() || line.starts_with("lavfi.")) continue;
    double value = 0.0;
    if (const auto pos = line.find("pts_time:"); pos != std::string::npos) {
      std::string_view rest = std::string_view(line).substr(pos + 9);
      rest = rest.substr(0, rest.find_first_of(" \t"));
      if (!parse_double(rest, value)) throw AdapterError("bad manifest line '" + line + "'", "");
    } else if (!parse_double(line, value)) {
      throw AdapterError("bad manifest line '" + line + "'", "");
    }
    out.push_back(value);
  }
  return out;
}

std::vector<KeyFrame> extract_iframes(const fs::path& video, const CodecAdapterConfig& adapter) {
  std::error_code ec;
  if (!fs::is_regular_file(video, ec)) throw InvalidArgument("video not found: " + video.string());
  if (fs::file_size(video, ec) == 0) return {};
  if (adapter.program.empty()) throw AdapterUnavailable("no codec program configured");

  proc::TempDir tmp("overlayx-frames");
  const fs::path outdir = tmp.path() / "frames";
  fs::create_directory(outdir);
  const fs::path manifest = tmp.path() / "manifest.txt";
  // The manifest path lands inside a filter graph, where these characters
  // are syntax.
  if (tmp.path().string().find_first_of(",:;'\\[]= ") != std::string::npos) {
    throw AdapterError("temporary directory path is not filter-safe: " + tmp.path().string(), "");
  }

  std::vector<std::string> argv = adapter.program;
  for (const auto& a : adapter.args) {
    std::string arg = replace_all(a, "{input}", video.string());
    arg = replace_all(arg, "{outdir}", outdir.string());
    arg = replace_all(arg, "{manifest}", manifest.string());
    argv.push_back(std::move(arg));
  }
  const proc::Result r = proc::run(argv);
  if (r.exit_code != 0) {
    throw AdapterError("codec adapter exited with status " + std::to_string(r.exit_code), proc::tail(r.err));
  }

  std::vector<double> stamps;
  if (fs::exists(manifest)) {
    std::ifstream in(manifest, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    stamps = parse_timestamp_manifest(buf.str());
  }
  const std::vector<fs::path> files = sorted_files(outdir);
  if (files.size() != stamps.size()) {
    throw AdapterError("codec adapter wrote " + std::to_string(files.size()) + " images but " +
                           std::to_string(stamps.size()) + " timestamps",
                       proc::tail(r.err));
  }

  std::vector<KeyFrame> frames;
  frames.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    KeyFrame k;
    try {
      k.image = codec::read_image(files[i]);
    } catch (const CodecError& e) {
      throw AdapterError("codec adapter wrote an unreadable image " + files[i].filename().string(), e.what());
    }
    k.timestamp = std::max(0.0, stamps[i]);
    frames.push_back(std::move(k));
  }
  std::stable_sort(frames.begin(), frames.end(),
                   [](const KeyFrame& a, const KeyFrame& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 0; i < frames.size(); ++i) frames[i].index = static_cast<std::uint32_t>(i);
  return frames;
}

std::vector<KeyFrame> frames_from_dir(const fs::path& dir, double fps, std::vector<std::string>* warnings) {
  if (!(fps > 0.0)) throw InvalidArgument("fps must be positive");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw InvalidArgument("frame directory not found: " + dir.string());
  std::vector<KeyFrame> frames;
  for (const auto& file : sorted_files(dir)) {
    KeyFrame k;
    try {
      k.image = codec::read_image(file);
    } catch (const CodecError& e) {
      if (warnings) warnings->push_back("skipped " + file.filename().string() + ": " + e.what());
      continue;
    }
    k.index = static_cast<std::uint32_t>(frames.size());
    k.timestamp = k.index / fps;
    frames.push_back(std::move(k));
  }
  return frames;
}

std::vector<KeyFrame> load_frames(const FrameSource& source, const CodecAdapterConfig& adapter,
                                  std::vector<std::string>* warnings) {
  if (const auto* v = std::get_if<VideoFile>(&source)) return extract_iframes(v->path, adapter);
  const auto& d = std::get<ImageDir>(source);
  return frames_from_dir(d.path, d.fps, warnings);
}

}  // namespace overlayx::frames
