#pragma once

#include "emm/error.hpp"
#include "emm/ingest.hpp"
#include "emm/text.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace emm::geo {

using LocationId = std::int64_t;

// Ascending order; country and region are the upper levels of the hierarchy.
enum class SizeClass { Town, City, MajorCity, Capital, Region, Country };

std::string to_string(SizeClass s);
std::optional<SizeClass> parse_size_class(std::string_view s);

struct GazetteerEntry {
  LocationId location_id = 0;
  std::map<std::string, std::vector<std::string>> names;  // language ("*" = any) -> names
  double latitude = 0.0;
  double longitude = 0.0;
  SizeClass size_class = SizeClass::Town;
  std::string country;  // ISO 3166-1 alpha-2
  std::optional<LocationId> parent;
};

class Gazetteer {
 public:
  // TSV rows: location_id, lang, name, lat, lon, size_class, country, parent_id.
  // One row per (location, language, name); attributes must agree across rows.
  static Gazetteer load(std::filesystem::path const& path);

  // Adds a name row; throws Error on inconsistent attributes.
  void add(GazetteerEntry const& row);
  // Checks coordinates and that every parent chain ends at a country entry.
  void validate() const;

  GazetteerEntry const* find(LocationId id) const;
  std::size_t size() const { return entries_.size(); }

  // Locations carrying exactly this token sequence as a name in `language`
  // or in the language-independent list. Sorted by id.
  std::vector<LocationId> lookup(std::string const& language, std::span<std::string const> tokens) const;
  std::size_t max_name_tokens() const { return max_tokens_; }

  // Ancestors from the parent up to the country.
  std::vector<LocationId> ancestors(LocationId id) const;

 private:
  std::map<LocationId, GazetteerEntry> entries_;
  std::unordered_map<std::string, std::unordered_map<std::string, std::vector<LocationId>>> names_;  // lang -> key -> ids
  std::size_t max_tokens_ = 0;
};

// Per-language geo-stop lists (`geostop/<lang>.txt`, one form per line),
// compared case-insensitively.
class GeoStopList {
 public:
  static GeoStopList load(std::filesystem::path const& dir);
  void add(std::string const& language, std::string const& surface);
  bool contains(std::string const& language, std::string_view surface) const;

 private:
  std::map<std::string, std::set<std::string>> forms_;
};

struct GeoMention {
  std::string surface;
  std::size_t token_offset = 0;
  std::size_t token_count = 1;
  std::vector<LocationId> candidates;
  std::optional<LocationId> resolved;

  friend bool operator==(GeoMention const&, GeoMention const&) = default;
};

// Longest-match scan of `text::article_text(title, body)`; stopped surfaces
// yield no mention.
std::vector<GeoMention> geo_parse(Article const& article, Gazetteer const& gazetteer, GeoStopList const& stop);
std::vector<GeoMention> geo_parse(std::span<text::Token const> tokens, std::string const& language,
                                  Gazetteer const& gazetteer, GeoStopList const& stop);

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

struct GeoContext {
  std::vector<TokenSpan> name_spans;  // tagged person and organisation names
  std::string source_country;
};

struct GeoParams {
  double country_bonus = 3.0;
  double distance_bonus = 2.0;
  double hierarchy_credit = 0.5;
};

double size_score(SizeClass s);

// Great-circle distance in km (haversine, mean earth radius).
double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Drops mentions inside tagged names and resolves the rest.
std::vector<GeoMention> geo_disambiguate(std::vector<GeoMention> mentions, GeoContext const& context,
                                         Gazetteer const& gazetteer, GeoParams const& params = {});

std::optional<LocationId> major_location(std::span<GeoMention const> mentions, Gazetteer const& gazetteer,
                                         double hierarchy_credit = 0.5);

using CountryVector = std::map<std::string, int>;

CountryVector country_vector(std::span<GeoMention const> mentions, Gazetteer const& gazetteer);

}  // namespace emm::geo
