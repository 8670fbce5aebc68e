// Straightforward single-threaded reference kernels.

#include <algorithm>

#include "imaging_detail.hpp"
#include "overlayx/error.hpp"
#include "overlayx/imaging.hpp"

namespace overlayx::imaging::serial {

using detail::clamp_index;
using detail::round_to_u8;

Image to_grayscale(const Image& img) {
  detail::require_channels(img, 3, "to_grayscale");
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const unsigned r = img.at(x, y, 0), g = img.at(x, y, 1), b = img.at(x, y, 2);
      out.at(x, y) = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
  }
  return out;
}

Image max_rgb_filter(const Image& img) {
  detail::require_channels(img, 3, "max_rgb_filter");
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = std::max({img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)});
    }
  }
  return out;
}

std::uint8_t otsu_threshold(const Image& gray) {
  detail::require_channels(gray, 1, "otsu_threshold");
  detail::Histogram hist{};
  for (std::uint8_t v : gray.data()) ++hist[v];
  return detail::otsu_from_histogram(hist);
}

Image binarize(const Image& gray, std::uint8_t t) {
  detail::require_channels(gray, 1, "binarize");
  Image out(gray.width(), gray.height(), 1);
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) out.at(x, y) = gray.at(x, y) > t ? 255 : 0;
  }
  return out;
}

Image gaussian_blur_5x5(const Image& gray) {
  detail::require_channels(gray, 1, "gaussian_blur_5x5");
  const auto& k = gaussian_kernel_5x5();
  const int w = gray.width();
  const int h = gray.height();
  Image out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      for (int ky = 0; ky < 5; ++ky) {
        for (int kx = 0; kx < 5; ++kx) {
          sum += k[ky][kx] * gray.at(clamp_index(x + kx - 2, w), clamp_index(y + ky - 2, h));
        }
      }
      out.at(x, y) = round_to_u8(sum);
    }
  }
  return out;
}

namespace {

Image erode_or_dilate(const Image& src, bool dilate) {
  const int w = src.width();
  const int h = src.height();
  Image out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = dilate ? 0 : 255;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const std::uint8_t s = src.at(clamp_index(x + dx, w), clamp_index(y + dy, h));
          v = dilate ? std::max(v, s) : std::min(v, s);
        }
      }
      out.at(x, y) = v;
    }
  }
  return out;
}

}  // namespace

Image morphological_open(const Image& binary) {
  detail::require_binary(binary, "morphological_open");
  return erode_or_dilate(erode_or_dilate(binary, false), true);
}

Image resize_antialias(const Image& img, int new_w, int new_h) {
  if (img.empty()) throw InvalidArgument("resize_antialias: empty image");
  if (new_w <= 0 || new_h <= 0) {
    throw InvalidArgument("resize_antialias: target dimensions must be >= 1");
  }
  const auto xtaps = detail::resample_taps(img.width(), new_w);
  const auto ytaps = detail::resample_taps(img.height(), new_h);
  Image out(new_w, new_h, img.channels());
  for (int y = 0; y < new_h; ++y) {
    for (int x = 0; x < new_w; ++x) {
      for (int ch = 0; ch < img.channels(); ++ch) {
        double sum = 0.0;
        for (const auto& ty : ytaps[y]) {
          double row_sum = 0.0;
          for (const auto& tx : xtaps[x]) row_sum += tx.weight * img.at(tx.index, ty.index, ch);
          sum += ty.weight * row_sum;
        }
        out.at(x, y, ch) = round_to_u8(sum);
      }
    }
  }
  return out;
}

}  // namespace overlayx::imaging::serial
