#pragma once

#include <array>
#include <string>
#include <string_view>

namespace overlayx {

// Ordered set of symbols a recognizer may emit. The default is a-z, 0-9 and
// the marks - , ? ' . : !
class Charset {
 public:
  // Throws InvalidArgument on duplicates, uppercase letters, whitespace or
  // non-ASCII bytes.
  explicit Charset(std::string_view symbols);

  static const Charset& standard();

  std::string_view symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool contains(char c) const { return member_[static_cast<unsigned char>(c)]; }

  // Neither a letter nor a digit.
  static bool is_mark(char c);

  // Lowercases ASCII letters and drops every byte outside the set. Spaces
  // survive only when keep_spaces is set; runs of them collapse to one and
  // leading or trailing ones are dropped.
  std::string restrict(std::string_view text, bool keep_spaces = false) const;

  // restrict() and then trims marks from both ends ("have," -> "have",
  // "it's" stays).
  std::string clean_token(std::string_view token) const;

 private:
  std::string symbols_;
  std::array<bool, 256> member_{};
};

inline constexpr std::string_view kDefaultCharset = "abcdefghijklmnopqrstuvwxyz0123456789-,?'.:!";

}  // namespace overlayx
