#include "emm/names.hpp"

#include <unicode/uscript.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace emm::names {
namespace {

std::string read_file(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(std::string const& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::string token_key(std::string_view surface) {
  std::string key;
  for (auto const& t : text::tokenize(text::nfc(surface))) {
    if (!key.empty()) key.push_back(' ');
    key += t.text;
  }
  return key;
}

std::size_t token_count(std::string_view surface) { return text::tokenize(surface).size(); }

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string squeeze(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ') {
      space = !out.empty();
    } else {
      if (space) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::string devowel(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!is_vowel(c)) out.push_back(c);
  }
  return squeeze(out);
}

std::string capitalise(std::string const& latin) {
  auto u = text::to_u32(latin);
  if (!u.empty()) u[0] = text::to_upper(u[0]);
  return text::to_utf8(u);
}

}  // namespace

std::string to_string(EntityType t) { return t == EntityType::Person ? "person" : "organization"; }

std::optional<EntityType> parse_entity_type(std::string_view s) {
  if (s == "person") return EntityType::Person;
  if (s == "organization") return EntityType::Organization;
  return std::nullopt;
}

LanguageParams parse_params(std::string_view source) {
  LanguageParams p;
  std::string section;
  std::size_t lineno = 0;
  for (auto const& raw : lines_of(std::string(source))) {
    ++lineno;
    auto const line = text::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto const value = text::nfc(line);
    if (section == "titles") {
      try {
        p.titles.push_back(catdsl::make_term(value));
      } catch (catdsl::ParseError const& e) {
        throw Error("params line " + std::to_string(lineno) + ": " + e.message());
      }
    } else if (section == "verbs") {
      p.verbs.push_back(value);
    } else if (section == "that") {
      p.that_words.push_back(value);
    } else if (section == "stop") {
      p.stop.insert(text::lower(value));
    } else if (section == "org_words") {
      p.org_words.insert(text::lower(value));
    } else if (section == "particles") {
      p.particles.insert(value);
    } else {
      throw Error("params line " + std::to_string(lineno) + ": entry outside a known section");
    }
  }
  return p;
}

NameParams NameParams::load(std::filesystem::path const& dir) {
  NameParams np;
  if (!std::filesystem::is_directory(dir)) return np;
  for (auto const& entry : std::filesystem::directory_iterator(dir)) {
    auto const stem = entry.path().stem().string();
    if (entry.path().extension() != ".txt" || stem.rfind("params_", 0) != 0) continue;
    try {
      np.by_lang_[stem.substr(7)] = parse_params(read_file(entry.path()));
    } catch (Error const& e) {
      throw Error(entry.path().filename().string() + ": " + e.what());
    }
  }
  return np;
}

LanguageParams const& NameParams::get(std::string const& language) const {
  auto const it = by_lang_.find(language);
  return it == by_lang_.end() ? empty_ : it->second;
}

bool is_latin(char32_t cp) {
  UErrorCode status = U_ZERO_ERROR;
  return uscript_getScript(static_cast<UChar32>(cp), &status) == USCRIPT_LATIN;
}

NameNormalizer NameNormalizer::load(std::filesystem::path const& dir) {
  NameNormalizer n;
  std::vector<std::filesystem::path> tables;
  for (auto const& entry : std::filesystem::directory_iterator(dir)) {
    auto const name = entry.path().filename().string();
    if (name.rfind("translit_", 0) == 0 && entry.path().extension() == ".tsv") tables.push_back(entry.path());
  }
  std::sort(tables.begin(), tables.end());
  for (auto const& path : tables) {
    std::size_t lineno = 0;
    for (auto const& line : lines_of(read_file(path))) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      auto const tab = line.find('\t');
      auto const from = text::to_u32(text::nfc(line.substr(0, tab)));
      if (tab == std::string::npos || from.size() != 1) {
        throw Error(path.filename().string() + ":" + std::to_string(lineno) + ": expected '<char>\\t<latin>'");
      }
      n.add_transliteration(from[0], line.substr(tab + 1));
    }
  }
  auto const rules = dir / "normrules.tsv";
  std::size_t lineno = 0;
  for (auto const& line : lines_of(read_file(rules))) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto const tab = line.find('\t');
    try {
      if (tab == std::string::npos) {
        n.add_rule(text::trim(line), "");
      } else {
        n.add_rule(line.substr(0, tab), line.substr(tab + 1));
      }
    } catch (std::exception const& e) {
      throw Error("normrules.tsv:" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return n;
}

void NameNormalizer::add_transliteration(char32_t from, std::string to) {
  char32_t const upper = text::to_upper(from);
  if (upper != from) translit_[upper] = capitalise(to);
  translit_[from] = std::move(to);
}

void NameNormalizer::add_rule(std::string const& pattern, std::string const& replacement) {
  Rule r;
  if (pattern == "!strip-diacritics") {
    r.strip_diacritics = true;
  } else if (!pattern.empty() && pattern[0] == '!') {
    throw Error("unknown built-in rule '" + pattern + "'");
  } else {
    r.pattern = std::regex(pattern, std::regex::ECMAScript | std::regex::optimize);
    r.replacement = replacement;
  }
  rules_.push_back(std::move(r));
}

std::string NameNormalizer::transliterate(std::string_view name, Diagnostics* diagnostics) const {
  std::string out;
  for (char32_t cp : text::to_u32(text::nfc(name))) {
    auto const it = translit_.find(cp);
    if (it != translit_.end()) {
      out += it->second;
      continue;
    }
    if (text::is_letter(cp) && !is_latin(cp) && diagnostics) {
      std::string ch;
      text::append_utf8(ch, cp);
      diagnostics->push_back({std::string(name), "no transliteration for '" + ch + "'"});
    }
    text::append_utf8(out, cp);
  }
  return out;
}

std::string NameNormalizer::apply_rules(std::string s) const {
  for (auto const& r : rules_) {
    s = r.strip_diacritics ? text::strip_diacritics(s) : std::regex_replace(s, r.pattern, r.replacement);
  }
  return squeeze(s);
}

std::string NameNormalizer::normalize(std::string_view latin) const {
  std::string folded;
  for (char32_t cp : text::lower(text::to_u32(text::nfc(latin)))) {
    if (text::is_word_char(cp)) {
      text::append_utf8(folded, cp);
    } else {
      folded.push_back(' ');
    }
  }
  return apply_rules(squeeze(folded));
}

std::string NameNormalizer::canonicalize(std::string_view latin) const {
  std::string c = devowel(normalize(latin));
  for (int i = 0; i < 16; ++i) {
    auto next = devowel(apply_rules(c));
    if (next == c) break;
    c = std::move(next);
  }
  return c;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t const sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) { return levenshtein(text::to_u32(a), text::to_u32(b)); }

double similarity(std::string_view a, std::string_view b) {
  auto const ua = text::to_u32(a);
  auto const ub = text::to_u32(b);
  std::size_t const longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
}

// ---------------------------------------------------------------- store

std::optional<EntityId> EntityStore::find_variant(std::string const& surface) const {
  auto const it = variant_index_.find(token_key(surface));
  if (it == variant_index_.end()) return std::nullopt;
  return it->second;
}

Entity const* EntityStore::find(EntityId id) const {
  auto const it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

void EntityStore::index(Entity const& e) {
  for (auto const& v : e.variants) {
    variant_index_[token_key(v)] = e.entity_id;
    max_tokens_ = std::max(max_tokens_, token_count(v));
  }
  auto& ids = canonical_index_[e.canonical];
  if (std::find(ids.begin(), ids.end(), e.entity_id) == ids.end()) {
    ids.insert(std::lower_bound(ids.begin(), ids.end(), e.entity_id), e.entity_id);
  }
}

void EntityStore::insert(Entity entity) {
  if (entity.entity_id < 1) throw Error("entity ids start at 1");
  if (entities_.count(entity.entity_id)) throw Error("duplicate entity id " + std::to_string(entity.entity_id));
  for (auto const& v : entity.variants) {
    auto const known = find_variant(v);
    if (known) throw Error("variant '" + v + "' already belongs to entity " + std::to_string(*known));
  }
  next_id_ = std::max(next_id_, entity.entity_id + 1);
  auto const& e = entities_.emplace(entity.entity_id, std::move(entity)).first->second;
  index(e);
}

void EntityStore::add_cluster_ref(EntityId id, std::string const& cluster_id) {
  auto const it = entities_.find(id);
  if (it != entities_.end()) it->second.cluster_refs.insert(cluster_id);
}

std::optional<EntityId> EntityStore::merge_variant(NameMention const& mention, NameNormalizer const& normalizer,
                                                   MergeParams const& params, Diagnostics* diagnostics) {
  auto add_titles = [&](Entity& e) {
    for (auto const& t : mention.titles) ++e.titles[t];
  };
  if (auto const known = find_variant(mention.surface)) {
    add_titles(entities_.at(*known));
    return known;
  }
  if (token_count(mention.surface) < 2) return std::nullopt;

  auto const latin = normalizer.transliterate(mention.surface, diagnostics);
  auto const canonical = normalizer.canonicalize(latin);
  if (canonical.empty()) return std::nullopt;
  auto const lowered = text::lower(latin);
  auto const normalized = normalizer.normalize(latin);

  EntityId best = 0;
  double best_score = -1.0;
  auto const it = canonical_index_.find(canonical);
  if (it != canonical_index_.end()) {
    for (EntityId id : it->second) {
      auto const& e = entities_.at(id);
      double const s1 = similarity(lowered, text::lower(e.primary_latin));
      double const s2 = similarity(normalized, normalizer.normalize(e.primary_latin));
      double const score = params.surface_weight * s1 + (1.0 - params.surface_weight) * s2;
      if (score > best_score) {
        best_score = score;
        best = id;
      }
    }
  }

  if (best != 0 && best_score >= params.threshold) {
    auto& e = entities_.at(best);
    e.variants.insert(mention.surface);
    add_titles(e);
    index(e);
    return best;
  }

  Entity e;
  e.entity_id = next_id_++;
  e.type = mention.type;
  e.primary = mention.surface;
  e.primary_latin = latin;
  e.canonical = canonical;
  e.variants.insert(mention.surface);
  add_titles(e);
  auto const id = e.entity_id;
  index(entities_.emplace(id, std::move(e)).first->second);
  return id;
}

// ---------------------------------------------------------------- recognition

namespace {

bool joinable_gap(std::string_view gap) {
  if (gap == "-" || gap == "'" || gap == "\xE2\x80\x99") return true;
  if (gap.empty()) return false;
  return std::all_of(gap.begin(), gap.end(), [](char c) { return c == ' ' || c == '\t'; });
}

struct Candidate {
  std::size_t begin;
  std::size_t end;
  bool known;
  std::optional<EntityId> entity;
  std::vector<std::string> titles;
};

}  // namespace

std::vector<NameMention> recognize_names(std::string_view source, std::span<text::Token const> tokens,
                                         LanguageParams const& params, EntityStore const* store) {
  std::size_t const n = tokens.size();
  std::vector<std::u32string> words(n);
  for (std::size_t i = 0; i < n; ++i) words[i] = text::to_u32(tokens[i].text);

  auto gap = [&](std::size_t i) {  // between token i and i + 1
    return source.substr(tokens[i].end, tokens[i + 1].begin - tokens[i].end);
  };
  auto slice = [&](std::size_t b, std::size_t e) {
    return std::string(source.substr(tokens[b].begin, tokens[e - 1].end - tokens[b].begin));
  };
  auto is_stop = [&](std::size_t i) { return params.stop.count(text::lower(tokens[i].text)) > 0; };
  auto is_name_word = [&](std::size_t i) { return text::is_capitalized(tokens[i].text) && !is_stop(i); };
  // Length of the title term matching at i (0 if none).
  auto title_at = [&](std::size_t i, std::size_t limit) -> std::size_t {
    std::size_t best = 0;
    for (auto const& t : params.titles) {
      auto const len = t.words.size();
      if (i + len > limit || len <= best) continue;
      bool ok = true;
      for (std::size_t k = 0; k < len && ok; ++k) ok = catdsl::match_word(t.words[k], words[i + k]);
      if (ok) best = len;
    }
    return best;
  };

  std::vector<Candidate> cands;

  // Capitalised runs.
  std::size_t i = 0;
  while (i < n) {
    if (!is_name_word(i)) {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < n && joinable_gap(gap(end - 1))) {
      if (is_name_word(end)) {
        ++end;
      } else {
        std::size_t k = end;
        while (k + 1 < n && params.particles.count(tokens[k].text) && joinable_gap(gap(k))) ++k;
        if (k == end || !is_name_word(k)) break;
        end = k + 1;
      }
    }
    Candidate c{i, end, false, std::nullopt, {}};
    // Titles directly before the run.
    for (auto const& t : params.titles) {
      auto const len = t.words.size();
      if (len > c.begin) continue;
      std::size_t const s = c.begin - len;
      bool ok = joinable_gap(gap(c.begin - 1));
      for (std::size_t k = 0; k < len && ok; ++k) ok = catdsl::match_word(t.words[k], words[s + k]);
      if (ok) {
        c.titles.push_back(slice(s, c.begin));
        break;
      }
    }
    // Leading titles inside the run.
    while (c.begin < c.end) {
      auto const len = title_at(c.begin, c.end);
      if (len == 0) break;
      c.titles.push_back(slice(c.begin, c.begin + len));
      c.begin += len;
    }
    while (c.begin < c.end && params.particles.count(tokens[c.begin].text)) ++c.begin;
    if (c.end - c.begin >= 2) cands.push_back(std::move(c));
    i = end;
  }

  // Known variants of any length.
  if (store && store->max_variant_tokens() > 0) {
    for (std::size_t b = 0; b < n; ++b) {
      std::size_t const longest = std::min(store->max_variant_tokens(), n - b);
      for (std::size_t len = longest; len >= 1; --len) {
        bool joined = true;
        for (std::size_t k = b; k + 1 < b + len && joined; ++k) joined = joinable_gap(gap(k));
        if (!joined) continue;
        auto const id = store->find_variant(slice(b, b + len));
        if (!id) continue;
        Candidate c{b, b + len, true, id, {}};
        if (b > 0) {
          for (auto const& t : params.titles) {
            auto const tl = t.words.size();
            if (tl > b || !joinable_gap(gap(b - 1))) continue;
            bool ok = true;
            for (std::size_t k = 0; k < tl && ok; ++k) ok = catdsl::match_word(t.words[k], words[b - tl + k]);
            if (ok) {
              c.titles.push_back(slice(b - tl, b));
              break;
            }
          }
        }
        cands.push_back(std::move(c));
        break;
      }
    }
  }

  // Known variants first, longest first; unknown runs keep their longest
  // uncovered stretch when it still has two tokens.
  std::stable_sort(cands.begin(), cands.end(), [](Candidate const& a, Candidate const& b) {
    if (a.known != b.known) return a.known;
    auto const la = a.end - a.begin, lb = b.end - b.begin;
    if (la != lb) return la > lb;
    return a.begin < b.begin;
  });
  std::vector<bool> used(n, false);
  std::vector<NameMention> out;
  for (auto& c : cands) {
    std::size_t best_b = c.begin, best_e = c.begin;
    for (std::size_t b = c.begin; b < c.end;) {
      if (used[b]) {
        ++b;
        continue;
      }
      std::size_t e = b;
      while (e < c.end && !used[e]) ++e;
      if (e - b > best_e - best_b) best_b = b, best_e = e;
      b = e;
    }
    if (c.known ? (best_b != c.begin || best_e != c.end) : best_e - best_b < 2) continue;
    if (best_b != c.begin) c.titles.clear();
    for (std::size_t k = best_b; k < best_e; ++k) used[k] = true;
    NameMention m;
    m.surface = slice(best_b, best_e);
    m.token_begin = best_b;
    m.token_end = best_e;
    m.titles = std::move(c.titles);
    m.entity = c.entity;
    bool org = false;
    for (std::size_t k = best_b; k < best_e && !org; ++k) org = params.org_words.count(text::lower(tokens[k].text)) > 0;
    m.type = org ? EntityType::Organization : EntityType::Person;
    if (c.entity && store) {
      if (auto const* e = store->find(*c.entity)) m.type = e->type;
    }
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(), [](NameMention const& a, NameMention const& b) { return a.token_begin < b.token_begin; });
  return out;
}

std::vector<NameMention> recognize_names(Article const& article, LanguageParams const& params, EntityStore const* store) {
  auto const source = text::article_text(article.title, article.body);
  auto const tokens = text::tokenize(source);
  return recognize_names(source, tokens, params, store);
}

EntityVector entity_vector(std::span<EntityId const> mentions) {
  EntityVector v;
  for (auto id : mentions) ++v[id];
  return v;
}

std::map<std::pair<EntityId, EntityId>, Cooccurrence> cooccurrence(std::span<std::set<EntityId> const> clusters) {
  std::map<std::pair<EntityId, EntityId>, Cooccurrence> out;
  for (auto const& ents : clusters) {
    if (ents.size() < 2) continue;
    double const w = 1.0 / static_cast<double>(ents.size() - 1);
    for (auto a = ents.begin(); a != ents.end(); ++a) {
      for (auto b = std::next(a); b != ents.end(); ++b) {
        auto& c = out[{*a, *b}];
        ++c.count;
        c.weighted += w;
      }
    }
  }
  return out;
}

}  // namespace emm::names
