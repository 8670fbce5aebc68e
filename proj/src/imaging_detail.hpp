#pragma once

// Pieces shared by the parallel and serial imaging kernels.

#include <array>
#include <cstdint>
#include <vector>

#include "overlayx/image.hpp"

namespace overlayx::imaging::detail {

using Histogram = std::array<std::uint64_t, 256>;

// Exact between-class-variance scan over a histogram. Returns the smallest
// maximizing threshold, or the single occupied value for constant images.
std::uint8_t otsu_from_histogram(const Histogram& hist);

// One output sample along an axis is sum(weight * src[index]).
struct Tap {
  int index;
  double weight;
};

// Area-average taps when shrinking, bilinear taps when growing or equal.
std::vector<std::vector<Tap>> resample_taps(int src_len, int dst_len);

inline std::uint8_t round_to_u8(double v) {
  const double r = static_cast<double>(static_cast<long>(v + 0.5));
  return static_cast<std::uint8_t>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
}

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

void require_channels(const Image& img, int channels, const char* op);
void require_binary(const Image& img, const char* op);

}  // namespace overlayx::imaging::detail
