#include "emm/quotes.hpp"

#include <algorithm>

namespace emm::quotes {
namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::size_t skip_blanks(std::string_view s, std::size_t pos) {
  while (pos < s.size() && is_blank(s[pos])) ++pos;
  return pos;
}

// Index of the token starting exactly at `pos`, or tokens.size().
std::size_t token_at(std::span<text::Token const> tokens, std::size_t pos) {
  auto const it = std::lower_bound(tokens.begin(), tokens.end(), pos,
                                   [](text::Token const& t, std::size_t p) { return t.begin < p; });
  if (it == tokens.end() || it->begin != pos) return tokens.size();
  return static_cast<std::size_t>(it - tokens.begin());
}

struct Phrase {
  std::vector<std::u32string> words;
};

std::vector<Phrase> phrases(std::vector<std::string> const& list) {
  std::vector<Phrase> out;
  for (auto const& entry : list) {
    Phrase p;
    for (auto const& t : text::tokenize(entry)) p.words.push_back(text::lower(text::to_u32(t.text)));
    if (!p.words.empty()) out.push_back(std::move(p));
  }
  std::stable_sort(out.begin(), out.end(), [](Phrase const& a, Phrase const& b) { return a.words.size() > b.words.size(); });
  return out;
}

// Longest phrase starting at token i with only blanks between its words.
// Returns the index one past its last token, or i.
std::size_t match_phrase(std::string_view s, std::span<text::Token const> tokens, std::size_t i,
                         std::vector<Phrase> const& list) {
  for (auto const& p : list) {
    if (i + p.words.size() > tokens.size()) continue;
    bool ok = true;
    for (std::size_t k = 0; k < p.words.size() && ok; ++k) {
      ok = text::lower(text::to_u32(tokens[i + k].text)) == p.words[k];
      if (ok && k > 0) {
        auto const gap = s.substr(tokens[i + k - 1].end, tokens[i + k].begin - tokens[i + k - 1].end);
        ok = !gap.empty() && std::all_of(gap.begin(), gap.end(), is_blank);
      }
    }
    if (ok) return i + p.words.size();
  }
  return i;
}

}  // namespace

std::vector<QuoteMarks> default_quote_marks() {
  return {{"\xC2\xAB", "\xC2\xBB"},         {"\xE2\x80\xB9", "\xE2\x80\xBA"}, {"\"", "\""},
          {"'", "'"},                       {"\xE2\x80\x9E", "\xE2\x80\x9C"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"},
          {"\xE2\x80\x98", "\xE2\x80\x99"}, {"<<", ">>"}};
}

std::vector<QuoteRecord> extract_quotes(std::string_view s, std::span<text::Token const> tokens,
                                        std::span<names::NameMention const> mentions,
                                        names::LanguageParams const& params, std::span<QuoteMarks const> marks,
                                        std::string const& article_id) {
  auto const verbs = phrases(params.verbs);
  auto const thats = phrases(params.that_words);
  std::vector<QuoteMarks> openers(marks.begin(), marks.end());
  std::stable_sort(openers.begin(), openers.end(),
                   [](QuoteMarks const& a, QuoteMarks const& b) { return a.open.size() > b.open.size(); });

  std::vector<names::NameMention const*> people;
  for (auto const& m : mentions) {
    if (m.type == names::EntityType::Person && m.token_end <= tokens.size() && m.token_begin < m.token_end) {
      people.push_back(&m);
    }
  }
  std::sort(people.begin(), people.end(),
            [](auto const* a, auto const* b) { return a->token_begin < b->token_begin; });

  std::vector<QuoteRecord> out;
  std::size_t consumed = 0;
  for (auto const* m : people) {
    std::size_t const start = tokens[m->token_begin].begin;
    if (start < consumed) continue;
    std::size_t pos = skip_blanks(s, tokens[m->token_end - 1].end);

    // Optional insert.
    if (pos < s.size() && s[pos] == ',') {
      auto const close = s.find(',', pos + 1);
      if (close != std::string_view::npos) {
        auto const insert = s.substr(pos + 1, close - pos - 1);
        bool const plain = insert.find('\n') == std::string_view::npos &&
                           text::length(text::trim(insert)) <= kMaxInsert;
        if (plain) pos = skip_blanks(s, close + 1);
      }
    }

    std::size_t const verb_tok = token_at(tokens, pos);
    if (verb_tok == tokens.size()) continue;
    std::size_t const after_verb = match_phrase(s, tokens, verb_tok, verbs);
    if (after_verb == verb_tok) continue;
    std::string const verb(s.substr(tokens[verb_tok].begin, tokens[after_verb - 1].end - tokens[verb_tok].begin));
    pos = skip_blanks(s, tokens[after_verb - 1].end);

    if (pos < s.size() && s[pos] == ':') pos = skip_blanks(s, pos + 1);
    if (auto const t = token_at(tokens, pos); t < tokens.size()) {
      auto const after = match_phrase(s, tokens, t, thats);
      if (after != t) pos = skip_blanks(s, tokens[after - 1].end);
    }

    for (auto const& qm : openers) {
      if (qm.open.empty() || qm.close.empty() || s.substr(pos, qm.open.size()) != qm.open) continue;
      std::size_t const qb = pos + qm.open.size();
      auto const qe = s.find(qm.close, qb);
      if (qe == std::string_view::npos) continue;
      auto const quote = s.substr(qb, qe - qb);
      if (text::trim(quote).empty() || quote.find('\n') != std::string_view::npos) continue;
      QuoteRecord r;
      r.entity_id = m->entity;
      r.speaker = m->surface;
      r.verb = verb;
      r.quote_text = std::string(quote);
      r.article_id = article_id;
      r.begin = start;
      r.end = qe + qm.close.size();
      r.quote_begin = qb;
      r.quote_end = qe;
      consumed = r.end;
      out.push_back(std::move(r));
      break;
    }
  }
  return out;
}

std::vector<QuoteRecord> extract_quotes(Article const& article, names::LanguageParams const& params,
                                        std::span<QuoteMarks const> marks, names::EntityStore const* store) {
  auto const source = text::article_text(article.title, article.body);
  auto const tokens = text::tokenize(source);
  auto const mentions = names::recognize_names(source, tokens, params, store);
  return extract_quotes(source, tokens, mentions, params, marks, article.article_id);
}

}  // namespace emm::quotes
