#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "overlayx/image.hpp"

namespace overlayx::fonts {

// Coverage mask of rendered text. `coverage` is 1-channel, 0 = background,
// 255 = full ink. Pen origin sits at (origin_x, baseline).
struct TextMask {
  Image coverage;
  int origin_x = 0;
  int baseline = 0;
  Rect ink;  // tight box of coverage > 0; w == 0 when nothing was drawn
};

struct FontInfo {
  std::string family;  // file stem up to the first '-', e.g. "DejaVuSans"
  std::string name;    // full file stem, e.g. "DejaVuSans-Bold"
  std::filesystem::path path;
};

// TrueType/OpenType fonts rendered through FreeType. Copies share the loaded
// faces; rendering is serialized per font, so one FontSet may be used from
// several threads.
class FontSet {
 public:
  FontSet();
  ~FontSet();
  FontSet(const FontSet&);
  FontSet& operator=(const FontSet&);
  FontSet(FontSet&&) noexcept;
  FontSet& operator=(FontSet&&) noexcept;

  // Every *.ttf / *.otf in `dir`, in filename order. Throws InvalidArgument
  // when the directory holds none or a font fails to load (naming the file).
  static FontSet load_dir(const std::filesystem::path& dir);

  // The bundled fonts (assets/fonts), or $OVERLAYX_FONTS_DIR when set.
  static FontSet bundled();
  static std::filesystem::path bundled_dir();

  std::size_t size() const;
  const FontInfo& info(std::size_t font_id) const;

  // Renders `text` with a nominal pixel height of `size`. Empty text gives a
  // 1x1 blank mask.
  TextMask render(std::size_t font_id, std::string_view text, int size) const;

  // Horizontal advance of `text` in pixels.
  int advance(std::size_t font_id, std::string_view text, int size) const;

  // Distance from the top of a line box to its baseline, in pixels: the
  // tallest ink above the baseline among letters, digits and marks.
  int ascent(std::size_t font_id, int size) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace overlayx::fonts
