#include "overlayx/image.hpp"

#include <algorithm>
#include <string>

#include "overlayx/error.hpp"

namespace overlayx {

namespace {

void check_shape(int width, int height, int channels) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw ImageFormatError("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
}

}  // namespace

Rect intersect(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.right(), b.right());
  const int y1 = std::min(a.bottom(), b.bottom());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

Rect unite(const Rect& a, const Rect& b) {
  const int x0 = std::min(a.x, b.x);
  const int y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.right(), b.right());
  const int y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_shape(width, height, channels);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw InvalidArgument("image data length " + std::to_string(data_.size()) +
                          " does not match " + std::to_string(width) + "x" +
                          std::to_string(height) + "x" + std::to_string(channels));
  }
}

Image crop(const Image& img, const Rect& r) {
  if (r.w <= 0 || r.h <= 0 || r.x < 0 || r.y < 0 || r.right() > img.width() ||
      r.bottom() > img.height()) {
    throw InvalidArgument("crop rectangle lies outside the image");
  }
  Image out(r.w, r.h, img.channels());
  const std::size_t row_bytes = static_cast<std::size_t>(r.w) * img.channels();
  for (int y = 0; y < r.h; ++y) {
    const std::uint8_t* src = img.row(r.y + y) + static_cast<std::size_t>(r.x) * img.channels();
    std::copy(src, src + row_bytes, out.row(y));
  }
  return out;
}

bool is_binary(const Image& img) {
  return std::all_of(img.data().begin(), img.data().end(),
                     [](std::uint8_t v) { return v == 0 || v == 255; });
}

}  // namespace overlayx
