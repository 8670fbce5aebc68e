#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "overlayx/image.hpp"

namespace overlayx::frames {

struct KeyFrame {
  Image image;
  double timestamp = 0.0;  // seconds
  std::uint32_t index = 0;
};

struct VideoFile {
  std::filesystem::path path;
};

struct ImageDir {
  std::filesystem::path path;
  double fps = 1.0;
};

using FrameSource = std::variant<VideoFile, ImageDir>;

// How the external codec tool is invoked. `args` may use the placeholders
// {input}, {outdir} and {manifest}; the tool must write numbered PNGs into
// {outdir} (lexicographic order = presentation order) and one line per image
// to {manifest}, either "... pts_time:<seconds>" or a bare number. Lines
// starting with "lavfi." are ignored.
struct CodecAdapterConfig {
  std::vector<std::string> program{"ffmpeg"};
  std::vector<std::string> args;

  // program from $OVERLAYX_FFMPEG (split on whitespace), the pinned
  // I-frame arguments otherwise.
  static CodecAdapterConfig from_env();
  static std::vector<std::string> default_args();
};

// The pinned ffmpeg argument template.
inline constexpr std::string_view kIframeFilter =
    "select=eq(pict_type\\,I),signalstats,metadata=mode=print:key=lavfi.signalstats.YAVG:file={manifest}";

// One KeyFrame per I-frame in presentation order. A 0-byte file yields no
// frames. Throws InvalidArgument for a missing file, AdapterUnavailable when
// the tool cannot be started and AdapterError (with the tool's stderr) when
// it fails or its output is inconsistent.
std::vector<KeyFrame> extract_iframes(const std::filesystem::path& video,
                                      const CodecAdapterConfig& adapter = CodecAdapterConfig::from_env());

// Images of `dir` in filename order, timestamp = index / fps. Files that do
// not decode are skipped and reported through `warnings`.
std::vector<KeyFrame> frames_from_dir(const std::filesystem::path& dir, double fps,
                                      std::vector<std::string>* warnings = nullptr);

std::vector<KeyFrame> load_frames(const FrameSource& source,
                                  const CodecAdapterConfig& adapter = CodecAdapterConfig::from_env(),
                                  std::vector<std::string>* warnings = nullptr);

// Timestamps listed in a codec manifest (see CodecAdapterConfig).
std::vector<double> parse_timestamp_manifest(std::string_view text);

}  // namespace overlayx::frames
