#include <gtest/gtest.h>

#include "overlayx/error.hpp"
#include "overlayx/fonts.hpp"

using namespace overlayx;

namespace {
const fonts::FontSet& bundled() {
  static const fonts::FontSet fs = fonts::FontSet::bundled();
  return fs;
}
}  // namespace

TEST(Fonts, BundledSetLoadsInFilenameOrder) {
  const auto& fs = bundled();
  ASSERT_GE(fs.size(), 4u);
  for (std::size_t i = 1; i < fs.size(); ++i)
    EXPECT_LT(fs.info(i - 1).path.filename(), fs.info(i).path.filename());
  EXPECT_EQ(fs.info(0).family, "DejaVuSans");
}

TEST(Fonts, MissingDirectoryThrows) {
  EXPECT_THROW(fonts::FontSet::load_dir("/nonexistent/fonts"), InvalidArgument);
}

TEST(Fonts, RenderProducesInkInsideMask) {
  const auto m = bundled().render(0, "Hello", 40);
  EXPECT_EQ(m.coverage.channels(), 1);
  ASSERT_GT(m.ink.w, 0);
  EXPECT_GT(m.ink.h, 20);
  EXPECT_LE(m.ink.right(), m.coverage.width());
  EXPECT_LE(m.ink.bottom(), m.coverage.height());
  // Ink box is tight.
  long inside = 0, outside = 0;
  for (int y = 0; y < m.coverage.height(); ++y)
    for (int x = 0; x < m.coverage.width(); ++x) {
      const bool in = x >= m.ink.x && x < m.ink.right() && y >= m.ink.y && y < m.ink.bottom();
      (in ? inside : outside) += m.coverage.at(x, y) > 0;
    }
  EXPECT_GT(inside, 0);
  EXPECT_EQ(outside, 0);
  // Descender-free text sits on the baseline.
  EXPECT_NEAR(m.ink.bottom(), m.baseline, 2);
}

TEST(Fonts, EmptyTextIsBlank) {
  const auto m = bundled().render(0, "", 30);
  EXPECT_EQ(m.coverage.width(), 1);
  EXPECT_EQ(m.coverage.height(), 1);
  EXPECT_EQ(m.ink.w, 0);
}

TEST(Fonts, AdvanceAndAscentScaleWithSize) {
  const auto& fs = bundled();
  const int a20 = fs.advance(0, "word", 20), a40 = fs.advance(0, "word", 40);
  EXPECT_GT(a20, 0);
  EXPECT_NEAR(a40, 2 * a20, 3);
  EXPECT_GT(fs.ascent(0, 40), fs.ascent(0, 20));
  EXPECT_LE(fs.ascent(0, 40), 40);
}

TEST(Fonts, RenderingIsDeterministic) {
  const auto& fs = bundled();
  for (std::size_t f = 0; f < fs.size(); ++f) {
    const auto a = fs.render(f, "quick?", 33), b = fs.render(f, "quick?", 33);
    EXPECT_EQ(a.coverage, b.coverage);
    EXPECT_EQ(a.ink, b.ink);
  }
}
