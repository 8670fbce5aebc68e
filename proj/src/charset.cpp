#include "overlayx/charset.hpp"

#include "overlayx/error.hpp"

namespace overlayx {

Charset::Charset(std::string_view symbols) : symbols_(symbols) {
  if (symbols.empty()) throw InvalidArgument("charset must not be empty");
  for (char c : symbols) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || u <= 0x20 || (c >= 'A' && c <= 'Z')) {
      throw InvalidArgument(std::string("charset symbol not allowed: '") + c + "'");
    }
    if (member_[u]) throw InvalidArgument(std::string("duplicate charset symbol '") + c + "'");
    member_[u] = true;
  }
}

const Charset& Charset::standard() {
  static const Charset charset(kDefaultCharset);
  return charset;
}

bool Charset::is_mark(char c) {
  return !((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'));
}

std::string Charset::restrict(std::string_view text, bool keep_spaces) const {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (contains(c)) {
      out.push_back(c);
    } else if (keep_spaces && (c == ' ' || c == '\t' || c == '\n' || c == '\r')) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    }
  }
  if (keep_spaces && !out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string Charset::clean_token(std::string_view token) const {
  std::string s = restrict(token);
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_mark(s[b])) ++b;
  while (e > b && is_mark(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace overlayx
