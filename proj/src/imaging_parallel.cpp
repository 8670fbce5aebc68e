// OpenMP kernels. Per-pixel arithmetic (and its summation order) matches
// imaging_serial.cpp exactly; only the loop scheduling differs.

#include <omp.h>

#include <algorithm>

#include "imaging_detail.hpp"
#include "overlayx/error.hpp"
#include "overlayx/imaging.hpp"

namespace overlayx::imaging {

using detail::clamp_index;
using detail::round_to_u8;

Image to_grayscale(const Image& img) {
  detail::require_channels(img, 3, "to_grayscale");
  Image out(img.width(), img.height(), 1);
  const int w = img.width();
  const int h = img.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = img.row(y);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      const unsigned r = src[3 * x], g = src[3 * x + 1], b = src[3 * x + 2];
      dst[x] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
    }
  }
  return out;
}

Image max_rgb_filter(const Image& img) {
  detail::require_channels(img, 3, "max_rgb_filter");
  Image out(img.width(), img.height(), 1);
  const int w = img.width();
  const int h = img.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = img.row(y);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      dst[x] = std::max({src[3 * x], src[3 * x + 1], src[3 * x + 2]});
    }
  }
  return out;
}

std::uint8_t otsu_threshold(const Image& gray) {
  detail::require_channels(gray, 1, "otsu_threshold");
  detail::Histogram hist{};
  const auto px = gray.data();
  const long n = static_cast<long>(px.size());
#pragma omp parallel
  {
    detail::Histogram local{};
#pragma omp for schedule(static) nowait
    for (long i = 0; i < n; ++i) ++local[px[i]];
#pragma omp critical(overlayx_otsu_hist)
    for (int v = 0; v < 256; ++v) hist[v] += local[v];
  }
  return detail::otsu_from_histogram(hist);
}

Image binarize(const Image& gray, std::uint8_t t) {
  detail::require_channels(gray, 1, "binarize");
  Image out(gray.width(), gray.height(), 1);
  const auto src = gray.data();
  auto dst = out.data();
  const long n = static_cast<long>(src.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) dst[i] = src[i] > t ? 255 : 0;
  return out;
}

Image gaussian_blur_5x5(const Image& gray) {
  detail::require_channels(gray, 1, "gaussian_blur_5x5");
  const auto& k = gaussian_kernel_5x5();
  const int w = gray.width();
  const int h = gray.height();
  Image out(w, h, 1);

  // Clamped column offsets for every x, computed once.
  std::vector<std::array<int, 5>> cols(w);
  for (int x = 0; x < w; ++x) {
    for (int i = 0; i < 5; ++i) cols[x][i] = clamp_index(x + i - 2, w);
  }

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    std::array<const std::uint8_t*, 5> rows{};
    for (int i = 0; i < 5; ++i) rows[i] = gray.row(clamp_index(y + i - 2, h));
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      const auto& cx = cols[x];
      double sum = 0.0;
      for (int ky = 0; ky < 5; ++ky) {
        for (int kx = 0; kx < 5; ++kx) sum += k[ky][kx] * rows[ky][cx[kx]];
      }
      dst[x] = round_to_u8(sum);
    }
  }
  return out;
}

namespace {

// 3x3 min (erode) or max (dilate) with edge replication.
template <typename Pick>
Image morph3x3(const Image& src, Pick pick) {
  const int w = src.width();
  const int h = src.height();
  Image out(w, h, 1);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* r0 = src.row(clamp_index(y - 1, h));
    const std::uint8_t* r1 = src.row(y);
    const std::uint8_t* r2 = src.row(clamp_index(y + 1, h));
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      const int xl = clamp_index(x - 1, w);
      const int xr = clamp_index(x + 1, w);
      std::uint8_t v = r0[xl];
      for (std::uint8_t s : {r0[x], r0[xr], r1[xl], r1[x], r1[xr], r2[xl], r2[x], r2[xr]}) {
        v = pick(v, s);
      }
      dst[x] = v;
    }
  }
  return out;
}

}  // namespace

Image morphological_open(const Image& binary) {
  detail::require_binary(binary, "morphological_open");
  auto min_op = [](std::uint8_t a, std::uint8_t b) { return std::min(a, b); };
  auto max_op = [](std::uint8_t a, std::uint8_t b) { return std::max(a, b); };
  return morph3x3(morph3x3(binary, min_op), max_op);
}

Image resize_antialias(const Image& img, int new_w, int new_h) {
  if (img.empty()) throw InvalidArgument("resize_antialias: empty image");
  if (new_w <= 0 || new_h <= 0) {
    throw InvalidArgument("resize_antialias: target dimensions must be >= 1");
  }
  const int c = img.channels();
  const auto xtaps = detail::resample_taps(img.width(), new_w);
  const auto ytaps = detail::resample_taps(img.height(), new_h);
  Image out(new_w, new_h, c);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < new_h; ++y) {
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < new_w; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        double sum = 0.0;
        for (const auto& ty : ytaps[y]) {
          const std::uint8_t* src = img.row(ty.index);
          double row_sum = 0.0;
          for (const auto& tx : xtaps[x]) row_sum += tx.weight * src[tx.index * c + ch];
          sum += ty.weight * row_sum;
        }
        dst[x * c + ch] = round_to_u8(sum);
      }
    }
  }
  return out;
}

}  // namespace overlayx::imaging
