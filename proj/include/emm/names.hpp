#pragma once

#include "emm/catdsl.hpp"
#include "emm/error.hpp"
#include "emm/ingest.hpp"
#include "emm/text.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace emm::names {

using EntityId = std::int64_t;

enum class EntityType { Person, Organization };

std::string to_string(EntityType t);
std::optional<EntityType> parse_entity_type(std::string_view s);

// Per-language recognition data from `params_<lang>.txt`. Sections:
// [titles] trigger terms (wildcards as in category definitions),
// [verbs] reporting verbs, [that] complementizers, [stop] capitalized words
// that never belong to a name, [org_words] words marking organisations,
// [particles] lowercase name particles such as "von" or "de".
struct LanguageParams {
  std::vector<catdsl::Term> titles;
  std::vector<std::string> verbs;
  std::vector<std::string> that_words;
  std::set<std::string> stop;       // lowercased
  std::set<std::string> org_words;  // lowercased
  std::set<std::string> particles;
};

LanguageParams parse_params(std::string_view source);

class NameParams {
 public:
  static NameParams load(std::filesystem::path const& dir);
  // Empty parameters for a language without a file.
  LanguageParams const& get(std::string const& language) const;
  void set(std::string language, LanguageParams params) { by_lang_[std::move(language)] = std::move(params); }

 private:
  std::map<std::string, LanguageParams> by_lang_;
  LanguageParams empty_;
};

// Transliteration tables and the ordered normalisation rules.
class NameNormalizer {
 public:
  // Reads translit_*.tsv and normrules.tsv from `dir`.
  static NameNormalizer load(std::filesystem::path const& dir);

  // Table rows map one lowercase character to Latin text; the uppercase form
  // maps to the capitalised Latin text.
  void add_transliteration(char32_t from, std::string to);
  // A rule is an ECMAScript regex and its replacement, or a built-in step
  // written as `!strip-diacritics`.
  void add_rule(std::string const& pattern, std::string const& replacement);
  std::size_t rule_count() const { return rules_.size(); }

  // Non-Latin letters are replaced per table; Latin text and non-letters pass
  // unchanged. Letters without a table entry pass through with a diagnostic.
  std::string transliterate(std::string_view name, Diagnostics* diagnostics = nullptr) const;

  // Lowercased, punctuation folded to single spaces, rules applied in order.
  std::string normalize(std::string_view latin) const;

  // normalize() followed by vowel removal, repeated to a fixpoint.
  std::string canonicalize(std::string_view latin) const;

 private:
  struct Rule {
    bool strip_diacritics = false;
    std::regex pattern;
    std::string replacement;
  };
  std::string apply_rules(std::string s) const;

  std::unordered_map<char32_t, std::string> translit_;
  std::vector<Rule> rules_;
};

bool is_latin(char32_t cp);

// Edit distance over code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);
// 1 - distance / longer length (1 for two empty strings).
double similarity(std::string_view a, std::string_view b);

struct NameMention {
  std::string surface;
  std::size_t token_begin = 0;
  std::size_t token_end = 0;  // exclusive
  EntityType type = EntityType::Person;
  std::vector<std::string> titles;
  std::optional<EntityId> entity;  // set for known variants

  std::size_t token_count() const { return token_end - token_begin; }
  friend bool operator==(NameMention const&, NameMention const&) = default;
};

struct Entity {
  EntityId entity_id = 0;
  EntityType type = EntityType::Person;
  std::string primary;        // first surface form seen
  std::string primary_latin;  // its transliteration
  std::string canonical;
  std::set<std::string> variants;
  std::map<std::string, int> titles;
  std::set<std::string> cluster_refs;  // story (chain) ids

  friend bool operator==(Entity const&, Entity const&) = default;
};

struct MergeParams {
  double threshold = 0.85;  // tau_name
  double surface_weight = 0.5;
};

// Known entities and their variants. IDs start at 1 and are never reused.
class EntityStore {
 public:
  std::optional<EntityId> find_variant(std::string const& surface) const;
  Entity const* find(EntityId id) const;
  std::map<EntityId, Entity> const& all() const { return entities_; }
  std::size_t size() const { return entities_.size(); }
  std::size_t max_variant_tokens() const { return max_tokens_; }

  // Known variant -> its entity. Otherwise merges into the best entity with
  // the same canonical form when the combined similarity reaches the
  // threshold, or creates a new entity. Unknown single-token names are not
  // added and yield nullopt.
  std::optional<EntityId> merge_variant(NameMention const& mention, NameNormalizer const& normalizer,
                                        MergeParams const& params = {}, Diagnostics* diagnostics = nullptr);

  void add_cluster_ref(EntityId id, std::string const& cluster_id);
  // Restores a persisted entity; throws Error on a duplicate id or variant.
  void insert(Entity entity);

  friend bool operator==(EntityStore const& a, EntityStore const& b) { return a.entities_ == b.entities_; }

 private:
  void index(Entity const& e);

  std::map<EntityId, Entity> entities_;
  std::unordered_map<std::string, EntityId> variant_index_;
  std::map<std::string, std::vector<EntityId>> canonical_index_;
  std::size_t max_tokens_ = 0;
  EntityId next_id_ = 1;
};

// Capitalised token runs of at least two name tokens plus known variants of
// any length. Offsets refer to text::tokenize(text::article_text(...)).
std::vector<NameMention> recognize_names(Article const& article, LanguageParams const& params,
                                         EntityStore const* store = nullptr);
std::vector<NameMention> recognize_names(std::string_view text, std::span<text::Token const> tokens,
                                         LanguageParams const& params, EntityStore const* store = nullptr);

using EntityVector = std::map<EntityId, int>;

EntityVector entity_vector(std::span<EntityId const> mentions);

struct Cooccurrence {
  int count = 0;
  double weighted = 0.0;

  friend bool operator==(Cooccurrence const&, Cooccurrence const&) = default;
};

// Keys are (smaller id, larger id). Each cluster contributes its distinct
// entities; a pair adds 1 to count and 1/(n-1) to weighted.
std::map<std::pair<EntityId, EntityId>, Cooccurrence> cooccurrence(std::span<std::set<EntityId> const> clusters);

}  // namespace emm::names
