#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "overlayx/charset.hpp"
#include "overlayx/fonts.hpp"
#include "overlayx/recognition.hpp"

namespace overlayx::recognition {

inline constexpr int kGlyphGrid = 16;

// One rendered symbol (or ligature) of one font. Geometry is in em units of
// the nominal font size, baseline at 0, up positive.
struct GlyphTemplate {
  std::string symbol;
  std::uint32_t font_id = 0;
  std::array<float, kGlyphGrid * kGlyphGrid> shape{};  // tight ink box, resampled, 0..1
  double top = 0.0;
  double bottom = 0.0;
  double width = 0.0;
  double aspect = 1.0;  // ink width / ink height
};

class GlyphAtlas {
 public:
  // Renders every charset symbol (plus the f-ligatures the charset can spell)
  // in every font at `reference_size` pixels.
  static GlyphAtlas build(const fonts::FontSet& fonts, const Charset& charset = Charset::standard(),
                          int reference_size = 64);

  const std::vector<GlyphTemplate>& glyphs() const { return glyphs_; }
  std::size_t font_count() const { return tops_.size(); }

  // Distinct ink top / bottom lines among a font's single-symbol glyphs.
  const std::vector<double>& top_lines(std::size_t font_id) const { return tops_.at(font_id); }
  const std::vector<double>& bottom_lines(std::size_t font_id) const { return bottoms_.at(font_id); }

 private:
  std::vector<GlyphTemplate> glyphs_;
  std::vector<std::vector<double>> tops_;
  std::vector<std::vector<double>> bottoms_;
};

// Deterministic template matcher. Binarizes the word with Otsu and picks the
// ink class: the one absent from the top and bottom rows, else the one that
// does not touch all four sides, else the one the atlas explains at lower
// cost per glyph. Connected components are cut into glyph columns at
// projection valleys and explained with atlas glyphs under the best font and
// baseline/scale hypothesis. Confidence is the mean shape similarity of the
// chosen glyphs. Blank input gives ("", 0).
Recognition template_recognize(const WordImage& word, const GlyphAtlas& atlas);

class TemplateRecognizer final : public RecognizerBackend {
 public:
  explicit TemplateRecognizer(std::shared_ptr<const GlyphAtlas> atlas) : atlas_(std::move(atlas)) {}
  std::vector<RawTranscription> transcribe(std::span<const WordImage> words) override;
  std::string name() const override { return "template"; }

 private:
  std::shared_ptr<const GlyphAtlas> atlas_;
};

}  // namespace overlayx::recognition
