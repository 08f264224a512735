#pragma once

#include "emm/error.hpp"
#include "emm/ingest.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

// Category definitions: one multilingual Boolean or weighted pattern per
// category, matched against every language with the same rules.
//
// Boolean grammar (keywords are uppercase):
//   expr    := and ( "OR" and )*
//   and     := unary ( "AND" unary )*
//   unary   := "NOT" unary | primary
//   primary := "(" expr ")" | "NEAR/" k "(" term "," term ")" | term
//   term    := bare-word | "quoted phrase"
//
// Weighted definitions start with a `threshold: <number>` header and list one
// `<signed weight> <term>` per line. Optional headers: `label:` and
// `country:` (ISO 3166 code, marks a country category). `#` starts a comment.
//
// Terms use SQL LIKE wildcards: `_` is exactly one character, `%` any run.
// An uppercase pattern character matches only itself; a lowercase one
// matches either case. A term must cover whole tokens; phrases match
// consecutive tokens.
namespace emm::catdsl {

class ParseError : public Error {
 public:
  ParseError(std::string const& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  std::string const& message() const { return message_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

struct Term {
  std::string pattern;                 // as written
  std::vector<std::u32string> words;   // one entry per token of the pattern
  double weight = 0.0;                 // weighted mode only

  friend bool operator==(Term const& a, Term const& b) { return a.pattern == b.pattern && a.weight == b.weight; }
};

// Throws ParseError on an empty pattern, adjacent `%%`, or no word content.
Term make_term(std::string_view pattern, double weight = 0.0);

enum class NodeKind { Term, And, Or, Not, Near };

struct Node {
  NodeKind kind = NodeKind::Term;
  Term term;                   // kind == Term
  int window = 0;              // kind == Near
  std::vector<Node> children;  // And/Or: >= 2, Not: 1, Near: 2 terms

  friend bool operator==(Node const&, Node const&) = default;
};

enum class Mode { Boolean, Weighted };

struct CategoryDefinition {
  std::string category_id;
  std::string label;
  std::string country;  // nonempty for country categories
  Mode mode = Mode::Boolean;
  Node expression;           // boolean mode
  std::vector<Term> terms;   // weighted mode
  double threshold = 0.0;    // weighted mode

  friend bool operator==(CategoryDefinition const&, CategoryDefinition const&) = default;
};

CategoryDefinition parse_definition(std::string_view source, std::string category_id = {});

// Canonical text form; parse_definition(to_string(d)) == d.
std::string to_string(CategoryDefinition const& def);
std::string to_string(Node const& node);

// One file per category; the file name is the category id.
std::vector<CategoryDefinition> load_definitions(std::filesystem::path const& dir);

struct MatchToken {
  std::u32string text;
  std::u32string folded;
};

// Title tokens followed by body tokens.
std::vector<MatchToken> match_tokens(std::string_view title, std::string_view body);
std::vector<MatchToken> match_tokens(Article const& article);

// Per-character matching of one pattern word against one token.
bool match_word(std::u32string_view pattern, std::u32string_view token);

// Start offsets of every occurrence of the term.
std::vector<std::size_t> match_term(Term const& term, std::span<MatchToken const> tokens);

struct MatchedTerm {
  std::string term;
  std::size_t offset = 0;

  friend bool operator==(MatchedTerm const&, MatchedTerm const&) = default;
};

struct MatchResult {
  bool matched = false;
  std::vector<MatchedTerm> matched_terms;
  double score = 0.0;  // weighted mode
};

MatchResult match_category(CategoryDefinition const& def, std::span<MatchToken const> tokens);
MatchResult match_category(CategoryDefinition const& def, Article const& article);

// Ids of every definition the article satisfies.
std::set<std::string> classify_all(std::span<CategoryDefinition const> defs, Article const& article);

// Compiled definition set. All distinct pattern words share a trie over
// their case-folded literal prefixes; a token only gets the full
// per-character check against patterns whose prefix it walks through.
class CategoryMatcher {
 public:
  explicit CategoryMatcher(std::vector<CategoryDefinition> defs);

  std::set<std::string> classify(std::span<MatchToken const> tokens) const;
  std::set<std::string> classify(Article const& article) const;

  std::vector<CategoryDefinition> const& definitions() const { return defs_; }
  std::size_t pattern_count() const { return words_.size(); }

 private:
  struct TrieNode {
    std::vector<std::pair<char32_t, int>> next;  // sorted by char
    std::vector<int> words;                      // patterns whose literal prefix ends here
  };
  struct CompiledTerm {
    std::vector<int> words;
  };

  int word_id(std::u32string const& w);
  int term_id(Term const& t);
  int child(int node, char32_t c) const;

  std::vector<CategoryDefinition> defs_;
  std::vector<std::u32string> words_;
  std::unordered_map<std::u32string, int> word_index_;
  std::vector<CompiledTerm> terms_;
  std::map<std::string, int> term_index_;
  std::vector<TrieNode> trie_;
};

}  // namespace emm::catdsl
