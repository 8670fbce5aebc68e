#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "overlayx/fonts.hpp"
#include "overlayx/image.hpp"

namespace overlayx::synth {

// Sorted, unique words over the standard charset.
using WordList = std::vector<std::string>;

// Every whitespace token of the transcripts and the word column of the
// frequency list (the first token on each line that contains a letter, so
// "rank word count" tables work as well as plain lists), cleaned with
// Charset::clean_token. Words shorter than 3 characters are dropped, then
// "0".."9" and each single mark are appended. Throws InvalidArgument when no
// word survives.
WordList build_wordlist(std::span<const std::string> transcript_texts, std::string_view freq_text);
WordList build_wordlist(std::span<const std::filesystem::path> transcripts, const std::filesystem::path& freq_list);

inline constexpr int kBackgroundWidth = 640;
inline constexpr int kBackgroundHeight = 192;

// RGB background regions free of text.
class BackgroundPool {
 public:
  BackgroundPool() = default;

  // Gradients, value noise, stripes and soft blobs, fully determined by seed.
  static BackgroundPool procedural(std::size_t count = 50, std::uint64_t seed = 1,
                                   int width = kBackgroundWidth, int height = kBackgroundHeight);
  // Every decodable PNG/JPEG in `dir`, filename order. Throws InvalidArgument
  // naming the file that failed.
  static BackgroundPool load_dir(const std::filesystem::path& dir);
  // One flat region per color.
  static BackgroundPool solid(std::span<const std::array<std::uint8_t, 3>> colors, int width = kBackgroundWidth,
                              int height = kBackgroundHeight);

  void add(Image rgb);
  std::size_t size() const { return images_.size(); }
  bool empty() const { return images_.empty(); }
  const Image& at(std::size_t i) const { return images_.at(i); }

 private:
  std::vector<Image> images_;
};

struct Assets {
  fonts::FontSet fonts;
  BackgroundPool backgrounds;
};

struct SampleSpec {
  std::string word;
  std::uint32_t font_id = 0;
  int size = 0;  // nominal pixel height
  std::array<std::uint8_t, 3> color{};
  std::uint32_t background_id = 0;
  int crop_x = 0;
  int crop_y = 0;
  std::uint64_t seed = 0;

  bool operator==(const SampleSpec&) const = default;
};

inline constexpr int kMinFontSize = 18;
inline constexpr int kMaxFontSize = 42;
inline constexpr int kMinLumaContrast = 40;
inline constexpr int kSampleWidth = 100;
inline constexpr int kSampleHeight = 32;

// Draws font, size, background, crop offset and color from `spec_seed`.
// Colors are redrawn until their luma differs from the crop's mean luma by
// at least kMinLumaContrast; placements that do not fit the background are
// redrawn too. Throws InvalidArgument after `max_retries` failed placements.
SampleSpec sample_spec(std::string_view word, const Assets& assets, std::uint64_t spec_seed,
                       int min_size = kMinFontSize, int max_size = kMaxFontSize, int max_retries = 32);

// Size of the background crop a word needs: its ink box plus a 10% margin
// on every side.
Rect crop_extent(const fonts::TextMask& mask);

// The background crop with the word alpha-composited on it, at natural
// size.
Image render_word_crop(const SampleSpec& spec, const Assets& assets);

// render_word_crop resized to 100x32.
Image render_sample(const SampleSpec& spec, const Assets& assets);

struct ManifestEntry {
  std::string path;  // relative to the dataset directory
  std::string label;
  SampleSpec spec;
};

nlohmann::json to_json(const SampleSpec& spec);
SampleSpec spec_from_json(const nlohmann::json& j);

// Per-sample seed derived from the master seed (splitmix64).
std::uint64_t sample_seed(std::uint64_t master, std::uint64_t sample_index);

// Writes images/<index>.jpg (quality 90) for |words| x samples_per_word
// samples plus manifest.jsonl, one {path, label, spec} object per line.
// Output bytes depend only on the inputs, not on thread count.
std::vector<ManifestEntry> generate_dataset(const WordList& words, const Assets& assets,
                                            std::uint32_t samples_per_word, std::uint64_t seed,
                                            const std::filesystem::path& out_dir);

// Full-frame fixtures.

// A word whose line box has its top-left corner at (x, y); the baseline sits
// at y + FontSet::ascent.
struct PlacedWord {
  std::string text;
  int x = 0;
  int y = 0;
};

struct FrameStyle {
  int width = 640;
  int height = 360;
  std::array<std::uint8_t, 3> background{24, 24, 32};
  std::array<std::uint8_t, 3> text{245, 245, 245};
  std::uint32_t font_id = 0;
  int size = 48;
  int noise = 0;  // amplitude of seeded background noise, 0 for flat
};

struct GroundTruthBox {
  Rect box;  // tight box of all glyph pixels
  std::string text;
};

struct FrameFixture {
  Image frame;
  std::vector<GroundTruthBox> boxes;
};

// Throws InvalidArgument when a word leaves the frame or two words' ink
// boxes overlap.
FrameFixture generate_frame_fixture(std::span<const PlacedWord> layout, const fonts::FontSet& fonts,
                                    const FrameStyle& style = {}, std::uint64_t seed = 0);

// Places `words` left to right from (x, y), separated by `gap_em` of the font
// size.
std::vector<PlacedWord> layout_line(std::span<const std::string> words, const fonts::FontSet& fonts,
                                    const FrameStyle& style, int x, int y, double gap_em = 0.75);

// Lines of space-separated words stacked downwards from (x, y), lines
// (1 + line_gap_em) x size apart.
std::vector<PlacedWord> layout_caption(std::span<const std::string> lines, const fonts::FontSet& fonts,
                                       const FrameStyle& style, int x, int y, double line_gap_em = 0.5,
                                       double word_gap_em = 0.75);

}  // namespace overlayx::synth
