#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emm::text {

// UTF-8 <-> UTF-32. Invalid input sequences decode to U+FFFD.
std::u32string to_u32(std::string_view s);
std::string to_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

bool is_valid_utf8(std::string_view s);
std::size_t length(std::string_view s);  // in code points

// Unicode normalization forms (ICU backed).
std::string nfc(std::string_view s);
std::string nfd(std::string_view s);

// Removes combining marks after canonical decomposition and folds a few
// letters that carry their diacritic in the base glyph (ł, ø, đ, ...).
std::string strip_diacritics(std::string_view s);

bool is_letter(char32_t cp);
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
bool is_mark(char32_t cp);
bool is_word_char(char32_t cp);  // letter, digit or combining mark
bool is_space(char32_t cp);
bool is_control(char32_t cp);
char32_t to_lower(char32_t cp);
char32_t to_upper(char32_t cp);

std::string lower(std::string_view s);
std::u32string lower(std::u32string_view s);

// Starts with an uppercase letter.
bool is_capitalized(std::string_view s);

// Drops control characters and collapses whitespace runs into one space;
// the result has no leading or trailing whitespace.
std::string clean_whitespace(std::string_view s);

std::string trim(std::string_view s);

// Shortest decimal form that parses back to the same double.
std::string format_number(double v);
// Whole-string decimal parse; nullopt on junk or a non-finite result.
std::optional<double> parse_number(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the source
  std::size_t end = 0;
};

// Word segmentation at word-char / non-word-char transitions. `extra` lists
// additional ASCII characters that count as word characters.
std::vector<Token> tokenize(std::string_view s, std::string_view extra = {});

// Title and body joined by a newline. Token offsets used by the name, place
// and quotation taggers refer to this text.
std::string article_text(std::string_view title, std::string_view body);

}  // namespace emm::text
