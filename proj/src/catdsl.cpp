#include "emm/catdsl.hpp"

#include "emm/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace emm::catdsl {

ParseError::ParseError(std::string const& message, std::size_t line, std::size_t column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      message_(message),
      line_(line),
      column_(column) {}

namespace {

// ---------------------------------------------------------------- lexing

enum class Tok { LParen, RParen, Comma, Word, Quoted, And, Or, Not, Near, End };

struct Lexeme {
  Tok kind = Tok::End;
  std::string text;
  int window = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool is_break(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '(' || c == ')' || c == ',' || c == '"' || c == '#';
}

class Lexer {
 public:
  Lexer(std::string_view src, std::size_t first_line) : src_(src), line_(first_line) {}

  Lexeme next() {
    skip();
    Lexeme lx;
    lx.line = line_;
    lx.column = column_;
    if (pos_ >= src_.size()) return lx;
    char const c = src_[pos_];
    if (c == '(' || c == ')' || c == ',') {
      advance();
      lx.kind = c == '(' ? Tok::LParen : c == ')' ? Tok::RParen : Tok::Comma;
      return lx;
    }
    if (c == '"') {
      advance();
      std::size_t const start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') advance();
      if (pos_ >= src_.size() || src_[pos_] != '"') throw ParseError("unterminated quoted term", lx.line, lx.column);
      lx.text = std::string(src_.substr(start, pos_ - start));
      advance();
      lx.kind = Tok::Quoted;
      return lx;
    }
    std::size_t const start = pos_;
    while (pos_ < src_.size() && !is_break(src_[pos_])) advance();
    lx.text = std::string(src_.substr(start, pos_ - start));
    if (lx.text == "AND") {
      lx.kind = Tok::And;
    } else if (lx.text == "OR") {
      lx.kind = Tok::Or;
    } else if (lx.text == "NOT") {
      lx.kind = Tok::Not;
    } else if (lx.text.rfind("NEAR", 0) == 0 && (lx.text.size() == 4 || lx.text[4] == '/')) {
      auto const digits = std::string_view(lx.text).substr(std::min<std::size_t>(5, lx.text.size()));
      int k = 0;
      auto const [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
      if (lx.text.size() <= 5 || ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw ParseError("NEAR needs a window: NEAR/k", lx.line, lx.column);
      }
      if (k < 1) throw ParseError("NEAR window must be >= 1", lx.line, lx.column);
      lx.kind = Tok::Near;
      lx.window = k;
    } else {
      lx.kind = Tok::Word;
    }
    return lx;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }
  void skip() {
    while (pos_ < src_.size()) {
      char const c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t column_ = 1;
};

class Parser {
 public:
  Parser(std::string_view src, std::size_t first_line) : lexer_(src, first_line) { cur_ = lexer_.next(); }

  Node parse() {
    Node n = expr();
    if (cur_.kind != Tok::End) fail("unexpected '" + describe(cur_) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(std::string const& msg) const { throw ParseError(msg, cur_.line, cur_.column); }

  static std::string describe(Lexeme const& lx) {
    switch (lx.kind) {
      case Tok::LParen: return "(";
      case Tok::RParen: return ")";
      case Tok::Comma: return ",";
      case Tok::End: return "end of input";
      case Tok::Quoted: return "\"" + lx.text + "\"";
      default: return lx.text;
    }
  }

  void expect(Tok kind, char const* what) {
    if (cur_.kind != kind) fail(std::string("expected ") + what + ", found '" + describe(cur_) + "'");
    cur_ = lexer_.next();
  }

  Node combine(NodeKind kind, Tok op, Node (Parser::*sub)()) {
    Node first = (this->*sub)();
    if (cur_.kind != op) return first;
    Node n;
    n.kind = kind;
    auto push = [&](Node child) {
      if (child.kind == kind) {
        for (auto& c : child.children) n.children.push_back(std::move(c));
      } else {
        n.children.push_back(std::move(child));
      }
    };
    push(std::move(first));
    while (cur_.kind == op) {
      cur_ = lexer_.next();
      push((this->*sub)());
    }
    return n;
  }

  Node expr() { return combine(NodeKind::Or, Tok::Or, &Parser::conj); }
  Node conj() { return combine(NodeKind::And, Tok::And, &Parser::unary); }

  Node unary() {
    if (cur_.kind == Tok::Not) {
      cur_ = lexer_.next();
      Node n;
      n.kind = NodeKind::Not;
      n.children.push_back(unary());
      return n;
    }
    return primary();
  }

  Node primary() {
    switch (cur_.kind) {
      case Tok::LParen: {
        cur_ = lexer_.next();
        Node n = expr();
        expect(Tok::RParen, "')'");
        return n;
      }
      case Tok::Near: {
        Node n;
        n.kind = NodeKind::Near;
        n.window = cur_.window;
        cur_ = lexer_.next();
        expect(Tok::LParen, "'(' after NEAR/k");
        n.children.push_back(term());
        expect(Tok::Comma, "','");
        n.children.push_back(term());
        expect(Tok::RParen, "')'");
        return n;
      }
      case Tok::Word:
      case Tok::Quoted: return term();
      default: fail("expected a term, '(' or NEAR/k, found '" + describe(cur_) + "'");
    }
  }

  Node term() {
    if (cur_.kind != Tok::Word && cur_.kind != Tok::Quoted) fail("expected a term, found '" + describe(cur_) + "'");
    Node n;
    n.kind = NodeKind::Term;
    try {
      n.term = make_term(cur_.text);
    } catch (ParseError const& e) {
      throw ParseError(e.message() + " in term '" + cur_.text + "'", cur_.line, cur_.column);
    }
    cur_ = lexer_.next();
    return n;
  }

  Lexer lexer_;
  Lexeme cur_;
};

// ---------------------------------------------------------------- evaluation

struct Span {
  std::size_t begin;
  std::size_t end;  // exclusive
};

std::size_t gap(Span a, Span b) {
  if (b.begin < a.begin) std::swap(a, b);
  if (b.begin < a.end) return 0;
  return b.begin - (a.end - 1);
}

using PositionsFn = std::function<std::vector<std::size_t> const&(Term const&)>;

struct Evaluator {
  PositionsFn positions;
  std::vector<MatchedTerm>* witness = nullptr;

  bool eval(Node const& n, bool positive) {
    switch (n.kind) {
      case NodeKind::Term: {
        auto const& pos = positions(n.term);
        if (pos.empty()) return false;
        if (positive && witness) {
          for (auto p : pos) witness->push_back({n.term.pattern, p});
        }
        return true;
      }
      case NodeKind::And: {
        bool all = true;
        for (auto const& c : n.children) all = eval(c, positive) && all;
        return all;
      }
      case NodeKind::Or: {
        bool any = false;
        for (auto const& c : n.children) any = eval(c, positive) || any;
        return any;
      }
      case NodeKind::Not: return !eval(n.children[0], !positive);
      case NodeKind::Near: {
        auto const& t1 = n.children[0].term;
        auto const& t2 = n.children[1].term;
        auto const& p1 = positions(t1);
        auto const& p2 = positions(t2);
        std::size_t const l1 = t1.words.size();
        std::size_t const l2 = t2.words.size();
        bool hit = false;
        for (auto a : p1) {
          for (auto b : p2) {
            Span const sa{a, a + l1};
            Span const sb{b, b + l2};
            if (sa.begin == sb.begin && sa.end == sb.end) continue;
            if (gap(sa, sb) <= static_cast<std::size_t>(n.window)) {
              hit = true;
              if (positive && witness) {
                witness->push_back({t1.pattern, a});
                witness->push_back({t2.pattern, b});
              }
            }
          }
        }
        return hit;
      }
    }
    return false;
  }
};

MatchResult evaluate(CategoryDefinition const& def, PositionsFn const& positions) {
  MatchResult r;
  if (def.mode == Mode::Weighted) {
    for (auto const& t : def.terms) {
      auto const& pos = positions(t);
      if (pos.empty()) continue;
      r.score += t.weight;
      for (auto p : pos) r.matched_terms.push_back({t.pattern, p});
    }
    r.matched = r.score >= def.threshold;
  } else {
    Evaluator ev{positions, &r.matched_terms};
    r.matched = ev.eval(def.expression, true);
    if (!r.matched) r.matched_terms.clear();
  }
  std::sort(r.matched_terms.begin(), r.matched_terms.end(), [](MatchedTerm const& a, MatchedTerm const& b) {
    return a.offset != b.offset ? a.offset < b.offset : a.term < b.term;
  });
  r.matched_terms.erase(std::unique(r.matched_terms.begin(), r.matched_terms.end()), r.matched_terms.end());
  return r;
}

bool matches_nothing(Node const& expr) {
  static std::vector<std::size_t> const kNone;
  Evaluator ev{[](Term const&) -> std::vector<std::size_t> const& { return kNone; }, nullptr};
  return !ev.eval(expr, true);
}

using text::format_number;

bool needs_quotes(std::string const& pattern) {
  if (pattern == "AND" || pattern == "OR" || pattern == "NOT") return true;
  if (pattern.rfind("NEAR", 0) == 0) return true;
  for (char c : pattern) {
    if (is_break(c)) return true;
  }
  return false;
}

std::string term_text(Term const& t) { return needs_quotes(t.pattern) ? "\"" + t.pattern + "\"" : t.pattern; }

char32_t const kOne = U'_';
char32_t const kAny = U'%';

bool char_matches(char32_t p, char32_t t) {
  if (p == kOne) return true;
  if (p == t) return true;
  if (text::is_lower(p)) return text::to_lower(t) == p;
  return false;
}

std::u32string literal_prefix(std::u32string const& word) {
  std::u32string prefix;
  for (char32_t c : word) {
    if (c == kOne || c == kAny) break;
    prefix.push_back(text::to_lower(c));
  }
  return prefix;
}

}  // namespace

Term make_term(std::string_view pattern, double weight) {
  Term t;
  t.pattern = text::nfc(text::trim(pattern));
  t.weight = weight;
  if (t.pattern.empty()) throw ParseError("empty term", 1, 1);
  if (t.pattern.find("%%") != std::string::npos) throw ParseError("adjacent '%%' wildcards", 1, 1);
  for (auto const& tok : text::tokenize(t.pattern, "_%")) t.words.push_back(text::to_u32(tok.text));
  if (t.words.empty()) throw ParseError("term has no word characters", 1, 1);
  for (auto const& w : t.words) {
    if (w.find(U"%%") != std::u32string::npos) throw ParseError("adjacent '%%' wildcards", 1, 1);
  }
  return t;
}

CategoryDefinition parse_definition(std::string_view source, std::string category_id) {
  CategoryDefinition def;
  def.category_id = std::move(category_id);

  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start <= source.size()) {
      auto const nl = source.find('\n', start);
      auto const end = nl == std::string_view::npos ? source.size() : nl;
      lines.emplace_back(source.substr(start, end - start));
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
  }

  std::optional<double> threshold;
  std::size_t body_line = 0;
  for (; body_line < lines.size(); ++body_line) {
    auto const line = text::trim(lines[body_line]);
    if (line.empty() || line[0] == '#') continue;
    auto const colon = line.find(':');
    if (colon == std::string::npos) break;
    auto const key = text::trim(line.substr(0, colon));
    auto const value = text::trim(line.substr(colon + 1));
    if (key == "label") {
      def.label = value;
    } else if (key == "country") {
      if (!is_country_code(value)) throw ParseError("invalid country code '" + value + "'", body_line + 1, 1);
      def.country = value;
    } else if (key == "threshold") {
      try {
        std::size_t used = 0;
        threshold = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(*threshold)) throw std::invalid_argument("x");
      } catch (std::logic_error const&) {
        throw ParseError("threshold must be a finite number", body_line + 1, colon + 2);
      }
    } else {
      break;
    }
  }

  if (!threshold) {
    std::string rest;
    for (std::size_t i = body_line; i < lines.size(); ++i) {
      if (i > body_line) rest += '\n';
      rest += lines[i];
    }
    Parser parser(rest, body_line + 1);
    def.mode = Mode::Boolean;
    def.expression = parser.parse();
    if (!matches_nothing(def.expression)) {
      throw ParseError("definition matches articles that contain none of its terms", body_line + 1, 1);
    }
    return def;
  }

  def.mode = Mode::Weighted;
  def.threshold = *threshold;
  for (std::size_t i = body_line; i < lines.size(); ++i) {
    std::string line = lines[i];
    bool in_quote = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '"') in_quote = !in_quote;
      if (line[k] == '#' && !in_quote) {
        line.resize(k);
        break;
      }
    }
    line = text::trim(line);
    if (line.empty()) continue;
    auto const space = line.find_first_of(" \t");
    if (space == std::string::npos) throw ParseError("expected '<weight> <term>'", i + 1, 1);
    double weight = 0;
    try {
      std::size_t used = 0;
      auto const w = line.substr(0, space);
      weight = std::stod(w, &used);
      if (used != w.size() || !std::isfinite(weight)) throw std::invalid_argument("x");
    } catch (std::logic_error const&) {
      throw ParseError("bad weight", i + 1, 1);
    }
    auto pattern = text::trim(line.substr(space + 1));
    if (pattern.size() >= 2 && pattern.front() == '"' && pattern.back() == '"') {
      pattern = pattern.substr(1, pattern.size() - 2);
    } else if (pattern.find('"') != std::string::npos) {
      throw ParseError("unbalanced quote", i + 1, space + 2);
    }
    try {
      def.terms.push_back(make_term(pattern, weight));
    } catch (ParseError const& e) {
      throw ParseError(e.message(), i + 1, space + 2);
    }
  }
  if (def.terms.empty()) throw ParseError("weighted definition without terms", lines.size(), 1);
  return def;
}

std::string to_string(Node const& node) {
  switch (node.kind) {
    case NodeKind::Term: return term_text(node.term);
    case NodeKind::Near:
      return "NEAR/" + std::to_string(node.window) + "(" + term_text(node.children[0].term) + ", " +
             term_text(node.children[1].term) + ")";
    case NodeKind::Not: {
      auto const& c = node.children[0];
      bool const wrap = c.kind == NodeKind::And || c.kind == NodeKind::Or;
      return "NOT " + (wrap ? "(" + to_string(c) + ")" : to_string(c));
    }
    case NodeKind::And:
    case NodeKind::Or: {
      std::string out;
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        auto const& c = node.children[i];
        if (i) out += node.kind == NodeKind::And ? " AND " : " OR ";
        bool const wrap = c.kind == NodeKind::And || c.kind == NodeKind::Or;
        out += wrap ? "(" + to_string(c) + ")" : to_string(c);
      }
      return out;
    }
  }
  return {};
}

std::string to_string(CategoryDefinition const& def) {
  std::string out;
  if (!def.label.empty()) out += "label: " + def.label + "\n";
  if (!def.country.empty()) out += "country: " + def.country + "\n";
  if (def.mode == Mode::Weighted) {
    out += "threshold: " + format_number(def.threshold) + "\n";
    for (auto const& t : def.terms) out += format_number(t.weight) + " " + term_text(t) + "\n";
  } else {
    out += to_string(def.expression) + "\n";
  }
  return out;
}

std::vector<CategoryDefinition> load_definitions(std::filesystem::path const& dir) {
  std::vector<std::filesystem::path> files;
  for (auto const& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto const name = entry.path().filename().string();
    if (name.empty() || name[0] == '.') continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CategoryDefinition> defs;
  for (auto const& path : files) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      defs.push_back(parse_definition(ss.str(), path.filename().string()));
    } catch (ParseError const& e) {
      throw ParseError(path.filename().string() + ": " + e.message(), e.line(), e.column());
    }
  }
  return defs;
}

std::vector<MatchToken> match_tokens(std::string_view title, std::string_view body) {
  std::vector<MatchToken> out;
  for (auto const* field : {&title, &body}) {
    for (auto& tok : text::tokenize(*field)) {
      MatchToken m;
      m.text = text::to_u32(tok.text);
      m.folded = text::lower(m.text);
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<MatchToken> match_tokens(Article const& article) { return match_tokens(article.title, article.body); }

bool match_word(std::u32string_view pattern, std::u32string_view token) {
  // Iterative glob match with single-star backtracking.
  std::size_t p = 0, t = 0;
  std::size_t star = std::u32string_view::npos, resume = 0;
  while (t < token.size()) {
    if (p < pattern.size() && pattern[p] == kAny) {
      star = p++;
      resume = t;
    } else if (p < pattern.size() && char_matches(pattern[p], token[t])) {
      ++p;
      ++t;
    } else if (star != std::u32string_view::npos) {
      p = star + 1;
      t = ++resume;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == kAny) ++p;
  return p == pattern.size();
}

std::vector<std::size_t> match_term(Term const& term, std::span<MatchToken const> tokens) {
  std::vector<std::size_t> hits;
  auto const n = term.words.size();
  if (n == 0 || tokens.size() < n) return hits;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) ok = match_word(term.words[k], tokens[i + k].text);
    if (ok) hits.push_back(i);
  }
  return hits;
}

MatchResult match_category(CategoryDefinition const& def, std::span<MatchToken const> tokens) {
  std::map<std::string, std::vector<std::size_t>> cache;
  return evaluate(def, [&](Term const& t) -> std::vector<std::size_t> const& {
    auto it = cache.find(t.pattern);
    if (it == cache.end()) it = cache.emplace(t.pattern, match_term(t, tokens)).first;
    return it->second;
  });
}

MatchResult match_category(CategoryDefinition const& def, Article const& article) {
  auto const tokens = match_tokens(article);
  return match_category(def, tokens);
}

std::set<std::string> classify_all(std::span<CategoryDefinition const> defs, Article const& article) {
  auto const tokens = match_tokens(article);
  std::set<std::string> out;
  for (auto const& d : defs) {
    if (match_category(d, tokens).matched) out.insert(d.category_id);
  }
  return out;
}

// ---------------------------------------------------------------- matcher

int CategoryMatcher::child(int node, char32_t c) const {
  auto const& next = trie_[static_cast<std::size_t>(node)].next;
  auto const it = std::lower_bound(next.begin(), next.end(), c, [](auto const& e, char32_t v) { return e.first < v; });
  return it != next.end() && it->first == c ? it->second : -1;
}

int CategoryMatcher::word_id(std::u32string const& w) {
  auto const it = word_index_.find(w);
  if (it != word_index_.end()) return it->second;
  int const id = static_cast<int>(words_.size());
  words_.push_back(w);
  word_index_.emplace(w, id);

  int node = 0;
  for (char32_t c : literal_prefix(w)) {
    int next = child(node, c);
    if (next < 0) {
      next = static_cast<int>(trie_.size());
      trie_.emplace_back();
      auto& edges = trie_[static_cast<std::size_t>(node)].next;
      edges.insert(std::lower_bound(edges.begin(), edges.end(), c, [](auto const& e, char32_t v) { return e.first < v; }),
                   {c, next});
    }
    node = next;
  }
  trie_[static_cast<std::size_t>(node)].words.push_back(id);
  return id;
}

int CategoryMatcher::term_id(Term const& t) {
  auto const it = term_index_.find(t.pattern);
  if (it != term_index_.end()) return it->second;
  CompiledTerm ct;
  for (auto const& w : t.words) ct.words.push_back(word_id(w));
  int const id = static_cast<int>(terms_.size());
  terms_.push_back(std::move(ct));
  term_index_.emplace(t.pattern, id);
  return id;
}

CategoryMatcher::CategoryMatcher(std::vector<CategoryDefinition> defs) : defs_(std::move(defs)) {
  trie_.emplace_back();
  std::function<void(Node const&)> walk = [&](Node const& n) {
    if (n.kind == NodeKind::Term) {
      term_id(n.term);
      return;
    }
    for (auto const& c : n.children) walk(c);
  };
  for (auto const& d : defs_) {
    if (d.mode == Mode::Weighted) {
      for (auto const& t : d.terms) term_id(t);
    } else {
      walk(d.expression);
    }
  }
}

std::set<std::string> CategoryMatcher::classify(std::span<MatchToken const> tokens) const {
  // Word hits: for each pattern word, the sorted token indices it matches.
  std::vector<std::vector<std::size_t>> word_hits(words_.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto const& tok = tokens[i];
    int node = 0;
    std::size_t depth = 0;
    while (true) {
      for (int w : trie_[static_cast<std::size_t>(node)].words) {
        if (match_word(words_[static_cast<std::size_t>(w)], tok.text)) word_hits[static_cast<std::size_t>(w)].push_back(i);
      }
      if (depth == tok.folded.size()) break;
      node = child(node, tok.folded[depth++]);
      if (node < 0) break;
    }
  }

  std::vector<std::vector<std::size_t>> term_hits(terms_.size());
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    auto const& words = terms_[t].words;
    auto const& first = word_hits[static_cast<std::size_t>(words[0])];
    for (auto start : first) {
      bool ok = true;
      for (std::size_t k = 1; k < words.size() && ok; ++k) {
        auto const& hits = word_hits[static_cast<std::size_t>(words[k])];
        ok = std::binary_search(hits.begin(), hits.end(), start + k);
      }
      if (ok) term_hits[t].push_back(start);
    }
  }

  std::set<std::string> out;
  for (auto const& d : defs_) {
    auto const r = evaluate(d, [&](Term const& t) -> std::vector<std::size_t> const& {
      return term_hits[static_cast<std::size_t>(term_index_.at(t.pattern))];
    });
    if (r.matched) out.insert(d.category_id);
  }
  return out;
}

std::set<std::string> CategoryMatcher::classify(Article const& article) const {
  auto const tokens = match_tokens(article);
  return classify(tokens);
}

}  // namespace emm::catdsl
