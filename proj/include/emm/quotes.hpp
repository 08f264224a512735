#pragma once

#include "emm/names.hpp"
#include "emm/text.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emm::quotes {

struct QuoteMarks {
  std::string open;
  std::string close;
};

// «» ‹› "" '' „“ “” ‘’ <<>>
std::vector<QuoteMarks> default_quote_marks();

struct QuoteRecord {
  std::optional<names::EntityId> entity_id;  // speaker, once merged
  std::string speaker;
  std::string verb;        // as written in the text
  std::string quote_text;  // between the marks
  std::string article_id;
  std::size_t begin = 0;  // byte span of the whole match in the tagged text
  std::size_t end = 0;
  std::size_t quote_begin = 0;
  std::size_t quote_end = 0;

  friend bool operator==(QuoteRecord const&, QuoteRecord const&) = default;
};

// Upper bound on the comma-delimited insert between name and verb, counted
// in code points after trimming.
constexpr std::size_t kMaxInsert = 60;

// Slot pattern: person name [, insert ,] verb [:] [that] OPEN quote CLOSE.
// `text` and `tokens` are those the mentions refer to. Matches are
// left-to-right and non-overlapping; organisation mentions never speak.
std::vector<QuoteRecord> extract_quotes(std::string_view text, std::span<text::Token const> tokens,
                                        std::span<names::NameMention const> mentions,
                                        names::LanguageParams const& params, std::span<QuoteMarks const> marks,
                                        std::string const& article_id = {});

// Tags the article with recognize_names first.
std::vector<QuoteRecord> extract_quotes(Article const& article, names::LanguageParams const& params,
                                        std::span<QuoteMarks const> marks, names::EntityStore const* store = nullptr);

}  // namespace emm::quotes
