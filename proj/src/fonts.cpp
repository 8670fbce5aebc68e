#include "overlayx/fonts.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <opencv2/freetype.hpp>
#include <opencv2/imgproc.hpp>

#include "overlayx/error.hpp"

#ifndef OVERLAYX_ASSETS_DIR
#define OVERLAYX_ASSETS_DIR "assets"
#endif

namespace overlayx::fonts {

namespace {

struct LoadedFont {
  FontInfo info;
  cv::Ptr<cv::freetype::FreeType2> face;
  std::unique_ptr<std::mutex> lock = std::make_unique<std::mutex>();
};

constexpr std::string_view kAscentProbe = "bdfhklt'!?0123456789";

}  // namespace

struct FontSet::Impl {
  std::vector<LoadedFont> fonts;
};

FontSet::FontSet() : impl_(std::make_shared<Impl>()) {}
FontSet::~FontSet() = default;
FontSet::FontSet(const FontSet&) = default;
FontSet& FontSet::operator=(const FontSet&) = default;
FontSet::FontSet(FontSet&&) noexcept = default;
FontSet& FontSet::operator=(FontSet&&) noexcept = default;

FontSet FontSet::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InvalidArgument("font directory does not exist: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".ttf" || ext == ".otf") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InvalidArgument("no .ttf/.otf fonts in " + dir.string());

  FontSet set;
  for (const auto& file : files) {
    LoadedFont font;
    font.info.path = file;
    font.info.name = file.stem().string();
    font.info.family = font.info.name.substr(0, font.info.name.find('-'));
    try {
      font.face = cv::freetype::createFreeType2();
      font.face->loadFontData(file.string(), 0);
    } catch (const cv::Exception& e) {
      throw InvalidArgument("failed to load font " + file.string() + ": " + e.what());
    }
    set.impl_->fonts.push_back(std::move(font));
  }
  return set;
}

std::filesystem::path FontSet::bundled_dir() {
  if (const char* env = std::getenv("OVERLAYX_FONTS_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return std::filesystem::path(OVERLAYX_ASSETS_DIR) / "fonts";
}

FontSet FontSet::bundled() { return load_dir(bundled_dir()); }

std::size_t FontSet::size() const { return impl_->fonts.size(); }

const FontInfo& FontSet::info(std::size_t font_id) const {
  if (font_id >= impl_->fonts.size()) throw InvalidArgument("font id out of range");
  return impl_->fonts[font_id].info;
}

TextMask FontSet::render(std::size_t font_id, std::string_view text, int size) const {
  if (font_id >= impl_->fonts.size()) throw InvalidArgument("font id out of range");
  if (size <= 0) throw InvalidArgument("font size must be positive");
  TextMask mask;
  if (text.empty()) {
    mask.coverage = Image(1, 1, 1);
    return mask;
  }
  const LoadedFont& font = impl_->fonts[font_id];
  const std::string str(text);

  // Generous padding: glyph ink can overhang the advance box.
  const int pad = size;
  cv::Mat canvas;
  {
    std::lock_guard guard(*font.lock);
    int below = 0;
    const cv::Size box = font.face->getTextSize(str, size, -1, &below);
    const int width = std::max(box.width, 1) + 2 * pad;
    const int height = size * 2 + 2 * pad;
    canvas = cv::Mat(height, width, CV_8UC3, cv::Scalar(0, 0, 0));
    mask.origin_x = pad;
    mask.baseline = pad + size + size / 4;
    font.face->putText(canvas, str, cv::Point(mask.origin_x, mask.baseline), size,
                       cv::Scalar(255, 255, 255), -1, cv::LINE_AA, true);
  }

  mask.coverage = Image(canvas.cols, canvas.rows, 1);
  int x0 = canvas.cols, y0 = canvas.rows, x1 = -1, y1 = -1;
  for (int y = 0; y < canvas.rows; ++y) {
    const auto* src = canvas.ptr<cv::Vec3b>(y);
    std::uint8_t* dst = mask.coverage.row(y);
    for (int x = 0; x < canvas.cols; ++x) {
      dst[x] = src[x][0];
      if (dst[x] != 0) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 >= 0) mask.ink = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
  return mask;
}

int FontSet::advance(std::size_t font_id, std::string_view text, int size) const {
  if (font_id >= impl_->fonts.size()) throw InvalidArgument("font id out of range");
  const LoadedFont& font = impl_->fonts[font_id];
  std::lock_guard guard(*font.lock);
  int below = 0;
  return font.face->getTextSize(std::string(text), size, -1, &below).width;
}

int FontSet::ascent(std::size_t font_id, int size) const {
  const TextMask m = render(font_id, kAscentProbe, size);
  return m.ink.w == 0 ? size : m.baseline - m.ink.y;
}

}  // namespace overlayx::fonts
