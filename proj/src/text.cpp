#include "emm/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace emm::text {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point at s[i], advancing i. Returns U+FFFD on malformed
// input and consumes a single byte in that case.
char32_t decode(std::string_view s, std::size_t& i) {
  auto const b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kReplacement;
  }
  if (i + len > s.size()) {
    ++i;
    return kReplacement;
  }
  for (int k = 1; k < len; ++k) {
    auto const b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong forms, surrogates and out-of-range values.
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++i;
    return kReplacement;
  }
  i += len;
  return cp;
}

icu::UnicodeString to_icu(std::string_view s) {
  return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

std::string from_icu(icu::UnicodeString const& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::string normalize(std::string_view s, icu::Normalizer2 const* (*get)(UErrorCode&)) {
  UErrorCode status = U_ZERO_ERROR;
  auto const* norm = get(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalizer unavailable");
  auto const src = to_icu(s);
  if (norm->isNormalized(src, status) && U_SUCCESS(status)) return std::string(s);
  status = U_ZERO_ERROR;
  auto const dst = norm->normalize(src, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  return from_icu(dst);
}

}  // namespace

std::u32string to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) out.push_back(decode(s, i));
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string to_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append_utf8(out, cp);
  return out;
}

bool is_valid_utf8(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    std::size_t const before = i;
    char32_t const cp = decode(s, i);
    if (cp == kReplacement) {
      // A literal U+FFFD is three bytes long; a decode failure consumes one.
      if (i - before != 3) return false;
    }
  }
  return true;
}

std::size_t length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size();) {
    decode(s, i);
    ++n;
  }
  return n;
}

std::string nfc(std::string_view s) { return normalize(s, &icu::Normalizer2::getNFCInstance); }
std::string nfd(std::string_view s) { return normalize(s, &icu::Normalizer2::getNFDInstance); }

std::string strip_diacritics(std::string_view s) {
  std::string out;
  for (char32_t cp : to_u32(nfd(s))) {
    if (is_mark(cp)) continue;
    switch (cp) {
      case U'ł': out += 'l'; break;
      case U'Ł': out += 'L'; break;
      case U'ø': out += 'o'; break;
      case U'Ø': out += 'O'; break;
      case U'đ': out += 'd'; break;
      case U'Đ': out += 'D'; break;
      case U'ß': out += "ss"; break;
      case U'æ': out += "ae"; break;
      case U'Æ': out += "AE"; break;
      case U'œ': out += "oe"; break;
      case U'Œ': out += "OE"; break;
      case U'ı': out += 'i'; break;
      case U'þ': out += "th"; break;
      case U'Þ': out += "Th"; break;
      default: append_utf8(out, cp);
    }
  }
  return out;
}

bool is_letter(char32_t cp) { return u_isalpha(static_cast<UChar32>(cp)); }
bool is_upper(char32_t cp) { return u_isupper(static_cast<UChar32>(cp)) || u_istitle(static_cast<UChar32>(cp)); }
bool is_lower(char32_t cp) { return u_islower(static_cast<UChar32>(cp)); }
bool is_mark(char32_t cp) { return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_M_MASK) != 0; }
bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  return u_isalnum(static_cast<UChar32>(cp)) || is_mark(cp);
}
bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }
bool is_control(char32_t cp) { return u_iscntrl(static_cast<UChar32>(cp)) && !is_space(cp); }
char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
}
char32_t to_upper(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') ? cp - 32 : cp;
  return static_cast<char32_t>(u_toupper(static_cast<UChar32>(cp)));
}

std::u32string lower(std::u32string_view s) {
  std::u32string out(s);
  for (auto& cp : out) cp = to_lower(cp);
  return out;
}

std::string lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    auto const c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
      ++i;
    } else {
      append_utf8(out, to_lower(decode(s, i)));
    }
  }
  return out;
}

bool is_capitalized(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = 0;
  return is_upper(decode(s, i));
}

std::string clean_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < s.size();) {
    char32_t const cp = decode(s, i);
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (is_control(cp) || cp == 0xFEFF) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append_utf8(out, cp);
  }
  return out;
}

std::string trim(std::string_view s) {
  auto const first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto const last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto const pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<Token> tokenize(std::string_view s, std::string_view extra) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  std::size_t start = std::string_view::npos;
  auto is_tok = [&](char32_t cp) {
    return is_word_char(cp) || (cp < 0x80 && extra.find(static_cast<char>(cp)) != std::string_view::npos);
  };
  while (i < s.size()) {
    std::size_t const at = i;
    char32_t const cp = decode(s, i);
    if (is_tok(cp)) {
      if (start == std::string_view::npos) start = at;
    } else if (start != std::string_view::npos) {
      tokens.push_back({std::string(s.substr(start, at - start)), start, at});
      start = std::string_view::npos;
    }
  }
  if (start != std::string_view::npos) tokens.push_back({std::string(s.substr(start)), start, s.size()});
  return tokens;
}

std::string article_text(std::string_view title, std::string_view body) {
  std::string out;
  out.reserve(title.size() + body.size() + 1);
  out.append(title);
  out.push_back('\n');
  out.append(body);
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto const res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto const res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace emm::text
