#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace overlayx {

// Axis-aligned pixel rectangle, [x, x + w) x [y, y + h).
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  long area() const { return static_cast<long>(w) * h; }

  bool operator==(const Rect&) const = default;
};

// Intersection of two rectangles; empty (w == 0 or h == 0) when disjoint.
Rect intersect(const Rect& a, const Rect& b);

// Smallest rectangle containing both.
Rect unite(const Rect& a, const Rect& b);

// Owned raster, row-major, interleaved channels (RGB order for 3 channels).
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::uint8_t fill = 0);
  Image(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }
  Rect bounds() const { return {0, 0, width_, height_}; }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  const std::uint8_t* row(int y) const {
    return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
  }
  std::uint8_t* row(int y) {
    return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
  }

  std::uint8_t at(int x, int y, int c = 0) const { return row(y)[x * channels_ + c]; }
  std::uint8_t& at(int x, int y, int c = 0) { return row(y)[x * channels_ + c]; }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

// Copy of the pixels inside `r`; `r` must lie within the image.
Image crop(const Image& img, const Rect& r);

// True when every sample is 0 or 255.
bool is_binary(const Image& img);

}  // namespace overlayx
