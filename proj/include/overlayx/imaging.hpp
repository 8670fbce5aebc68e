#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "overlayx/image.hpp"

namespace overlayx::imaging {

// The five preprocessing variants compared for word recognition.
enum class PreprocessMethod { None, Otsu, BlurOtsu, BlurOtsuOpen, MaxRgb };

std::string_view to_string(PreprocessMethod method);

// Accepts the names produced by to_string ("none", "otsu", "blur-otsu",
// "blur-otsu-open", "max-rgb"). Throws InvalidArgument otherwise.
PreprocessMethod parse_preprocess_method(std::string_view name);

using Kernel5x5 = std::array<std::array<double, 5>, 5>;

// Normalized 5x5 Gaussian, sigma = 1.1. Separable 1-D taps are
// {0.070766, 0.244460, 0.369546, 0.244460, 0.070766}.
const Kernel5x5& gaussian_kernel_5x5();
inline constexpr double kGaussianSigma = 1.1;

// OpenMP-parallel kernels. Each is bit-identical to its counterpart in
// imaging::serial for every input.

// BT.601 luma, rounded half up. Throws ImageFormatError on 1-channel input.
Image to_grayscale(const Image& img);

// Per-pixel max(R, G, B). Throws ImageFormatError on 1-channel input.
Image max_rgb_filter(const Image& img);

// Threshold t maximizing between-class variance of {p <= t} vs {p > t}.
// Ties go to the smallest t; a constant image returns its value.
std::uint8_t otsu_threshold(const Image& gray);

// p <= t -> 0, p > t -> 255.
Image binarize(const Image& gray, std::uint8_t t);

// Edge-replicated convolution with gaussian_kernel_5x5().
Image gaussian_blur_5x5(const Image& gray);

// 3x3 square erosion then dilation, edge-replicated. Input must be binary.
Image morphological_open(const Image& binary);

// Area averaging along axes that shrink, bilinear along axes that grow.
// Throws InvalidArgument for a zero or negative target dimension.
Image resize_antialias(const Image& img, int new_w, int new_h);

// Composes the ops above per method. 1-channel input skips the colour
// collapse step, so preprocess(gray, None) == gray.
Image preprocess(const Image& img, PreprocessMethod method);

// Single-threaded reference implementations, kept for equivalence tests and
// the benchmark.
namespace serial {
Image to_grayscale(const Image& img);
Image max_rgb_filter(const Image& img);
std::uint8_t otsu_threshold(const Image& gray);
Image binarize(const Image& gray, std::uint8_t t);
Image gaussian_blur_5x5(const Image& gray);
Image morphological_open(const Image& binary);
Image resize_antialias(const Image& img, int new_w, int new_h);
}  // namespace serial

}  // namespace overlayx::imaging
