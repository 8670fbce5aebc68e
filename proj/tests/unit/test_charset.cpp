#include <gtest/gtest.h>

#include "overlayx/charset.hpp"
#include "overlayx/error.hpp"

using overlayx::Charset;

TEST(Charset, StandardSetHas43Symbols) {
  const auto& cs = Charset::standard();
  EXPECT_EQ(cs.size(), 43u);
  EXPECT_EQ(cs.symbols(), overlayx::kDefaultCharset);
  EXPECT_TRUE(cs.contains('a'));
  EXPECT_TRUE(cs.contains('9'));
  EXPECT_TRUE(cs.contains('\''));
  EXPECT_FALSE(cs.contains('A'));
  EXPECT_FALSE(cs.contains(' '));
  EXPECT_FALSE(cs.contains('"'));
}

TEST(Charset, RejectsBadSymbolSets) {
  EXPECT_THROW(Charset("abca"), overlayx::InvalidArgument);
  EXPECT_THROW(Charset("abC"), overlayx::InvalidArgument);
  EXPECT_THROW(Charset("a b"), overlayx::InvalidArgument);
  EXPECT_THROW(Charset("a\xc3\xa9"), overlayx::InvalidArgument);
  EXPECT_NO_THROW(Charset("xyz"));
}

TEST(Charset, MarksAreNonAlphanumeric) {
  EXPECT_TRUE(Charset::is_mark('-'));
  EXPECT_TRUE(Charset::is_mark('!'));
  EXPECT_FALSE(Charset::is_mark('q'));
  EXPECT_FALSE(Charset::is_mark('7'));
}

TEST(Charset, RestrictLowercasesAndDrops) {
  const auto& cs = Charset::standard();
  EXPECT_EQ(cs.restrict("HELLO€!"), "hello!");
  EXPECT_EQ(cs.restrict("a b"), "ab");
  EXPECT_EQ(cs.restrict("  Two   Words ", true), "two words");
  EXPECT_EQ(cs.restrict("x\t\ny", true), "x y");
  EXPECT_EQ(cs.restrict("\"quoted\""), "quoted");
}

TEST(Charset, CleanTokenTrimsEdgeMarks) {
  const auto& cs = Charset::standard();
  EXPECT_EQ(cs.clean_token("have,"), "have");
  EXPECT_EQ(cs.clean_token("it's"), "it's");
  EXPECT_EQ(cs.clean_token("...Wait!?"), "wait");
  EXPECT_EQ(cs.clean_token("--"), "");
  EXPECT_EQ(cs.clean_token("2018."), "2018");
}

TEST(Charset, RestrictIsIdempotent) {
  const auto& cs = Charset::standard();
  for (std::string s : {"Mixed CASE, text!", "\xe2\x82\xac uro", "  a  b  ", ""}) {
    const auto once = cs.restrict(s, true);
    EXPECT_EQ(cs.restrict(once, true), once);
    const auto tok = cs.clean_token(s);
    EXPECT_EQ(cs.clean_token(tok), tok);
  }
}
