#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "overlayx/error.hpp"
#include "overlayx/imaging.hpp"

using namespace overlayx;
using namespace overlayx::imaging;

namespace {

Image random_image(std::mt19937& rng, int w, int h, int channels) {
  Image img(w, h, channels);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& p : img.data()) p = static_cast<std::uint8_t>(d(rng));
  return img;
}

Image random_binary(std::mt19937& rng, int w, int h) {
  Image img(w, h, 1);
  std::bernoulli_distribution d(0.4);
  for (auto& p : img.data()) p = d(rng) ? 255 : 0;
  return img;
}

Image gray_from(int w, int h, std::vector<std::uint8_t> px) { return Image(w, h, 1, std::move(px)); }

}  // namespace

TEST(Grayscale, UsesBt601WeightsRoundedHalfUp) {
  Image rgb(3, 1, 3, std::vector<std::uint8_t>{255, 0, 0, 0, 255, 0, 0, 0, 255});
  const Image g = to_grayscale(rgb);
  EXPECT_EQ(g.at(0, 0), 76);   // 76.245
  EXPECT_EQ(g.at(1, 0), 150);  // 149.685
  EXPECT_EQ(g.at(2, 0), 29);   // 29.07
  EXPECT_THROW(to_grayscale(Image(2, 2, 1)), ImageFormatError);
}

TEST(MaxRgb, TakesChannelMaximum) {
  Image rgb(2, 1, 3, std::vector<std::uint8_t>{10, 200, 30, 7, 7, 9});
  const Image m = max_rgb_filter(rgb);
  EXPECT_EQ(m.channels(), 1);
  EXPECT_EQ(m.at(0, 0), 200);
  EXPECT_EQ(m.at(1, 0), 9);
  EXPECT_THROW(max_rgb_filter(Image(2, 2, 1)), ImageFormatError);
}

TEST(Otsu, BimodalImageSplitsBetweenModes) {
  std::vector<std::uint8_t> px(64, 40);
  for (int i = 32; i < 64; ++i) px[i] = 200;
  const auto t = otsu_threshold(gray_from(8, 8, px));
  EXPECT_GE(t, 40);
  EXPECT_LT(t, 200);
  // Every t in [40, 199] yields the same partition; the smallest wins.
  EXPECT_EQ(t, 40);
}

TEST(Otsu, ConstantImageReturnsItsValue) {
  EXPECT_EQ(otsu_threshold(Image(5, 5, 1, 77)), 77);
  EXPECT_EQ(serial::otsu_threshold(Image(5, 5, 1, 0)), 0);
}

TEST(Otsu, MatchesExhaustiveSearchOnRandomImages) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Image img = random_image(rng, 1 + i % 17, 1 + (i * 7) % 13, 1);
    ASSERT_EQ(otsu_threshold(img), overlayx::testing::exhaustive_otsu(img)) << "image " << i;
  }
}

TEST(Otsu, MatchesExhaustiveSearchOnFewLevelImages) {
  // Few distinct values make exact ties between partitions common.
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> level(0, 3);
  for (int i = 0; i < 200; ++i) {
    Image img(9, 7, 1);
    for (auto& p : img.data()) p = static_cast<std::uint8_t>(level(rng) * 85);
    ASSERT_EQ(otsu_threshold(img), overlayx::testing::exhaustive_otsu(img)) << "image " << i;
  }
}

TEST(Binarize, MapsAtOrBelowThresholdToZero) {
  const Image b = binarize(gray_from(3, 1, {9, 10, 11}), 10);
  EXPECT_EQ(b.at(0, 0), 0);
  EXPECT_EQ(b.at(1, 0), 0);
  EXPECT_EQ(b.at(2, 0), 255);
  EXPECT_TRUE(is_binary(b));
}

TEST(GaussianKernel, SigmaAndTapsMatchClosedForm) {
  const auto& k = gaussian_kernel_5x5();
  double sum = 0.0;
  for (const auto& row : k)
    for (double v : row) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  const double taps[5] = {0.070766, 0.244460, 0.369546, 0.244460, 0.070766};
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) EXPECT_NEAR(k[y][x], taps[y] * taps[x], 2e-6);
  EXPECT_EQ(std::lround(255 * k[0][0]), 1);
  EXPECT_EQ(std::lround(255 * k[2][2]), 35);
  EXPECT_EQ(std::lround(255 * k[1][2]), 23);
}

TEST(GaussianBlur, ConstantImageIsFixedPoint) {
  const Image img(7, 6, 1, 123);
  EXPECT_EQ(gaussian_blur_5x5(img), img);
}

TEST(GaussianBlur, ImpulseSpreadsAsKernel) {
  Image img(9, 9, 1, 0);
  img.at(4, 4) = 255;
  const Image b = gaussian_blur_5x5(img);
  const auto& k = gaussian_kernel_5x5();
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx)
      EXPECT_EQ(b.at(4 + dx, 4 + dy), static_cast<std::uint8_t>(std::floor(255 * k[dy + 2][dx + 2] + 0.5)));
  EXPECT_EQ(b.at(0, 0), 0);
}

TEST(MorphOpen, RemovesIsolatedPixelsAndKeepsBlocks) {
  Image img(10, 10, 1, 0);
  img.at(1, 1) = 255;
  for (int y = 4; y < 8; ++y)
    for (int x = 4; x < 8; ++x) img.at(x, y) = 255;
  const Image o = morphological_open(img);
  EXPECT_EQ(o.at(1, 1), 0);
  for (int y = 4; y < 8; ++y)
    for (int x = 4; x < 8; ++x) EXPECT_EQ(o.at(x, y), 255);
  EXPECT_THROW(morphological_open(Image(3, 3, 1, 7)), ImageFormatError);
}

TEST(MorphOpen, IsIdempotentAndAntiExtensive) {
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Image img = random_binary(rng, 12, 9);
    const Image o = morphological_open(img);
    EXPECT_EQ(morphological_open(o), o);
    for (std::size_t p = 0; p < img.size(); ++p) EXPECT_LE(o.data()[p], img.data()[p]);
  }
}

TEST(Resize, ProducesRequestedSize) {
  const Image img(37, 11, 3, 50);
  const Image r = resize_antialias(img, 100, 32);
  EXPECT_EQ(r.width(), 100);
  EXPECT_EQ(r.height(), 32);
  EXPECT_EQ(r, Image(100, 32, 3, 50));
  EXPECT_THROW(resize_antialias(img, 0, 5), InvalidArgument);
}

TEST(Resize, DownscaleByTwoAveragesBlocks) {
  const Image img = gray_from(4, 2, {0, 100, 10, 20, 200, 100, 30, 40});
  const Image r = resize_antialias(img, 2, 1);
  EXPECT_EQ(r.at(0, 0), 100);
  EXPECT_EQ(r.at(1, 0), 25);
}

TEST(Preprocess, ComposesStages) {
  std::mt19937 rng(9);
  const Image rgb = random_image(rng, 20, 12, 3);
  const Image gray = to_grayscale(rgb);
  EXPECT_EQ(preprocess(rgb, PreprocessMethod::None), gray);
  EXPECT_EQ(preprocess(rgb, PreprocessMethod::MaxRgb), max_rgb_filter(rgb));
  EXPECT_EQ(preprocess(rgb, PreprocessMethod::Otsu), binarize(gray, otsu_threshold(gray)));
  const Image blurred = gaussian_blur_5x5(gray);
  const Image bo = binarize(blurred, otsu_threshold(blurred));
  EXPECT_EQ(preprocess(rgb, PreprocessMethod::BlurOtsu), bo);
  EXPECT_EQ(preprocess(rgb, PreprocessMethod::BlurOtsuOpen), morphological_open(bo));
  EXPECT_EQ(preprocess(gray, PreprocessMethod::None), gray);
}

TEST(Preprocess, MethodNamesRoundTrip) {
  for (auto m : {PreprocessMethod::None, PreprocessMethod::Otsu, PreprocessMethod::BlurOtsu,
                 PreprocessMethod::BlurOtsuOpen, PreprocessMethod::MaxRgb}) {
    EXPECT_EQ(parse_preprocess_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_preprocess_method("sharpen"), InvalidArgument);
}

// The OpenMP kernels must agree bit for bit with the serial references.
TEST(SerialEquivalence, AllKernelsMatch) {
  std::mt19937 rng(21);
  for (int i = 0; i < 25; ++i) {
    const int w = 1 + static_cast<int>(rng() % 70), h = 1 + static_cast<int>(rng() % 40);
    const Image rgb = random_image(rng, w, h, 3);
    const Image gray = random_image(rng, w, h, 1);
    const Image bin = random_binary(rng, w, h);
    EXPECT_EQ(to_grayscale(rgb), serial::to_grayscale(rgb));
    EXPECT_EQ(max_rgb_filter(rgb), serial::max_rgb_filter(rgb));
    EXPECT_EQ(otsu_threshold(gray), serial::otsu_threshold(gray));
    EXPECT_EQ(binarize(gray, 100), serial::binarize(gray, 100));
    EXPECT_EQ(gaussian_blur_5x5(gray), serial::gaussian_blur_5x5(gray));
    EXPECT_EQ(morphological_open(bin), serial::morphological_open(bin));
    const int nw = 1 + static_cast<int>(rng() % 90), nh = 1 + static_cast<int>(rng() % 50);
    EXPECT_EQ(resize_antialias(rgb, nw, nh), serial::resize_antialias(rgb, nw, nh));
    EXPECT_EQ(resize_antialias(gray, nw, nh), serial::resize_antialias(gray, nw, nh));
  }
}
