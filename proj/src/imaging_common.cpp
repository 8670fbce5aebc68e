#include <cmath>
#include <string>

#include "imaging_detail.hpp"
#include "overlayx/error.hpp"
#include "overlayx/imaging.hpp"

namespace overlayx::imaging {

namespace detail {

namespace {

using u128 = unsigned __int128;

// Sign of a/b - c/d for b, d > 0, by continued-fraction expansion; no
// intermediate products, so nothing overflows.
int compare_fractions(u128 a, u128 b, u128 c, u128 d) {
  while (true) {
    const u128 qa = a / b;
    const u128 qc = c / d;
    if (qa != qc) return qa < qc ? -1 : 1;
    const u128 ra = a % b;
    const u128 rc = c % d;
    if (ra == 0 || rc == 0) {
      if (ra == rc) return 0;
      return ra == 0 ? -1 : 1;
    }
    // ra/b vs rc/d has the same sign as d/rc vs b/ra.
    const u128 old_b = b;
    a = d;
    b = rc;
    c = old_b;
    d = ra;
  }
}

}  // namespace

std::uint8_t otsu_from_histogram(const Histogram& hist) {
  std::uint64_t total = 0;
  std::uint64_t total_sum = 0;
  for (int v = 0; v < 256; ++v) {
    total += hist[v];
    total_sum += hist[v] * static_cast<std::uint64_t>(v);
  }
  if (total == 0) throw InvalidArgument("otsu_threshold: empty image");

  // Between-class variance at t is proportional to
  //   (N * s0 - S * w0)^2 / (w0 * (N - w0)),
  // with w0, s0 the count and sum of pixels <= t.
  std::uint64_t w0 = 0;
  std::uint64_t s0 = 0;
  bool have_best = false;
  int best_t = 0;
  u128 best_num = 0;
  u128 best_den = 1;
  for (int t = 0; t < 256; ++t) {
    w0 += hist[t];
    s0 += hist[t] * static_cast<std::uint64_t>(t);
    if (w0 == 0 || w0 == total) continue;
    const __int128 diff = static_cast<__int128>(total) * s0 - static_cast<__int128>(total_sum) * w0;
    const u128 mag = static_cast<u128>(diff < 0 ? -diff : diff);
    const u128 num = mag * mag;
    const u128 den = static_cast<u128>(w0) * (total - w0);
    if (!have_best || compare_fractions(num, den, best_num, best_den) > 0) {
      have_best = true;
      best_t = t;
      best_num = num;
      best_den = den;
    }
  }
  if (!have_best) {
    for (int v = 0; v < 256; ++v) {
      if (hist[v] != 0) return static_cast<std::uint8_t>(v);
    }
  }
  return static_cast<std::uint8_t>(best_t);
}

std::vector<std::vector<Tap>> resample_taps(int src_len, int dst_len) {
  std::vector<std::vector<Tap>> taps(dst_len);
  const double scale = static_cast<double>(src_len) / dst_len;
  if (dst_len < src_len) {
    for (int i = 0; i < dst_len; ++i) {
      const double lo = i * scale;
      const double hi = lo + scale;
      for (int s = static_cast<int>(std::floor(lo)); s < src_len && s < hi; ++s) {
        const double overlap = std::min<double>(s + 1, hi) - std::max<double>(s, lo);
        if (overlap > 0.0) taps[i].push_back({s, overlap / scale});
      }
    }
  } else {
    for (int i = 0; i < dst_len; ++i) {
      double pos = (i + 0.5) * scale - 0.5;
      if (pos < 0.0) pos = 0.0;
      if (pos > src_len - 1) pos = src_len - 1;
      const int left = static_cast<int>(std::floor(pos));
      const double frac = pos - left;
      if (frac == 0.0 || left + 1 >= src_len) {
        taps[i].push_back({left, 1.0});
      } else {
        taps[i].push_back({left, 1.0 - frac});
        taps[i].push_back({left + 1, frac});
      }
    }
  }
  return taps;
}

void require_channels(const Image& img, int channels, const char* op) {
  if (img.empty()) throw InvalidArgument(std::string(op) + ": empty image");
  if (img.channels() != channels) {
    throw ImageFormatError(std::string(op) + ": expected " + std::to_string(channels) +
                           "-channel input, got " + std::to_string(img.channels()));
  }
}

void require_binary(const Image& img, const char* op) {
  require_channels(img, 1, op);
  if (!is_binary(img)) {
    throw ImageFormatError(std::string(op) + ": input is not binary (values must be 0 or 255)");
  }
}

}  // namespace detail

std::string_view to_string(PreprocessMethod method) {
  switch (method) {
    case PreprocessMethod::None: return "none";
    case PreprocessMethod::Otsu: return "otsu";
    case PreprocessMethod::BlurOtsu: return "blur-otsu";
    case PreprocessMethod::BlurOtsuOpen: return "blur-otsu-open";
    case PreprocessMethod::MaxRgb: return "max-rgb";
  }
  return "none";
}

PreprocessMethod parse_preprocess_method(std::string_view name) {
  for (auto m : {PreprocessMethod::None, PreprocessMethod::Otsu, PreprocessMethod::BlurOtsu,
                 PreprocessMethod::BlurOtsuOpen, PreprocessMethod::MaxRgb}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidArgument("unknown preprocessing method '" + std::string(name) + "'");
}

const Kernel5x5& gaussian_kernel_5x5() {
  static const Kernel5x5 kernel = [] {
    std::array<double, 5> taps{};
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double d = i - 2;
      taps[i] = std::exp(-(d * d) / (2.0 * kGaussianSigma * kGaussianSigma));
      sum += taps[i];
    }
    Kernel5x5 k{};
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 5; ++x) k[y][x] = (taps[y] / sum) * (taps[x] / sum);
    }
    return k;
  }();
  return kernel;
}

Image preprocess(const Image& img, PreprocessMethod method) {
  if (img.empty()) throw InvalidArgument("preprocess: empty image");
  if (method == PreprocessMethod::MaxRgb) {
    return img.channels() == 3 ? max_rgb_filter(img) : img;
  }
  const Image gray = img.channels() == 3 ? to_grayscale(img) : img;
  switch (method) {
    case PreprocessMethod::None:
      return gray;
    case PreprocessMethod::Otsu:
      return binarize(gray, otsu_threshold(gray));
    case PreprocessMethod::BlurOtsu: {
      const Image blurred = gaussian_blur_5x5(gray);
      return binarize(blurred, otsu_threshold(blurred));
    }
    case PreprocessMethod::BlurOtsuOpen: {
      const Image blurred = gaussian_blur_5x5(gray);
      return morphological_open(binarize(blurred, otsu_threshold(blurred)));
    }
    case PreprocessMethod::MaxRgb:
      break;
  }
  return gray;
}

}  // namespace overlayx::imaging
