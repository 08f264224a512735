#include "emm/geotag.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace emm::geo {
namespace {

std::string join_key(std::span<std::string const> tokens) {
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) key.push_back('\x1f');
    key += tokens[i];
  }
  return key;
}

std::vector<std::string> name_tokens(std::string_view name) {
  std::vector<std::string> out;
  for (auto& t : text::tokenize(text::nfc(name))) out.push_back(std::move(t.text));
  return out;
}

double parse_double(std::string const& s, std::string const& what) {
  try {
    std::size_t used = 0;
    double const v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (std::logic_error const&) {
    throw Error("invalid " + what + " '" + s + "'");
  }
}

LocationId parse_id(std::string const& s) {
  LocationId v = 0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("invalid location id '" + s + "'");
  return v;
}

}  // namespace

std::string to_string(SizeClass s) {
  switch (s) {
    case SizeClass::Town: return "town";
    case SizeClass::City: return "city";
    case SizeClass::MajorCity: return "major-city";
    case SizeClass::Capital: return "capital";
    case SizeClass::Region: return "region";
    case SizeClass::Country: return "country";
  }
  return "town";
}

std::optional<SizeClass> parse_size_class(std::string_view s) {
  for (auto c : {SizeClass::Town, SizeClass::City, SizeClass::MajorCity, SizeClass::Capital, SizeClass::Region,
                 SizeClass::Country}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

Gazetteer Gazetteer::load(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gazetteer " + path.string());
  Gazetteer g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto const cols = text::split(line, '\t');
    auto const where = path.filename().string() + ":" + std::to_string(lineno) + ": ";
    if (cols.size() != 7 && cols.size() != 8) throw Error(where + "expected 8 tab-separated columns");
    try {
      GazetteerEntry row;
      row.location_id = parse_id(cols[0]);
      row.names[cols[1]].push_back(cols[2]);
      row.latitude = parse_double(cols[3], "latitude");
      row.longitude = parse_double(cols[4], "longitude");
      auto const sc = parse_size_class(cols[5]);
      if (!sc) throw Error("unknown size class '" + cols[5] + "'");
      row.size_class = *sc;
      row.country = cols[6];
      if (cols.size() == 8 && !cols[7].empty()) row.parent = parse_id(cols[7]);
      g.add(row);
    } catch (Error const& e) {
      throw Error(where + e.what());
    }
  }
  g.validate();
  return g;
}

void Gazetteer::add(GazetteerEntry const& row) {
  if (std::abs(row.latitude) > 90.0 || std::abs(row.longitude) > 180.0) {
    throw Error("coordinates out of range for location " + std::to_string(row.location_id));
  }
  if (!is_country_code(row.country)) throw Error("invalid country code '" + row.country + "'");
  auto [it, inserted] = entries_.try_emplace(row.location_id, row);
  auto& e = it->second;
  if (!inserted) {
    if (e.latitude != row.latitude || e.longitude != row.longitude || e.size_class != row.size_class ||
        e.country != row.country || e.parent != row.parent) {
      throw Error("inconsistent attributes for location " + std::to_string(row.location_id));
    }
    for (auto const& [lang, names] : row.names) {
      auto& dst = e.names[lang];
      for (auto const& n : names) {
        if (std::find(dst.begin(), dst.end(), n) == dst.end()) dst.push_back(n);
      }
    }
  }
  for (auto const& [lang, names] : row.names) {
    for (auto const& n : names) {
      auto const toks = name_tokens(n);
      if (toks.empty()) throw Error("empty name for location " + std::to_string(row.location_id));
      max_tokens_ = std::max(max_tokens_, toks.size());
      auto& ids = names_[lang][join_key(toks)];
      if (std::find(ids.begin(), ids.end(), row.location_id) == ids.end()) {
        ids.insert(std::lower_bound(ids.begin(), ids.end(), row.location_id), row.location_id);
      }
    }
  }
}

void Gazetteer::validate() const {
  for (auto const& [id, e] : entries_) {
    std::set<LocationId> seen{id};
    GazetteerEntry const* cur = &e;
    while (cur->parent) {
      if (!seen.insert(*cur->parent).second) throw Error("parent cycle at location " + std::to_string(id));
      cur = find(*cur->parent);
      if (!cur) throw Error("location " + std::to_string(id) + " has an unknown ancestor");
    }
    if (cur->size_class != SizeClass::Country) {
      throw Error("parent chain of location " + std::to_string(id) + " does not end at a country");
    }
  }
}

GazetteerEntry const* Gazetteer::find(LocationId id) const {
  auto const it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<LocationId> Gazetteer::lookup(std::string const& language, std::span<std::string const> tokens) const {
  auto const key = join_key(tokens);
  std::vector<LocationId> out;
  for (auto const* lang : {&language, static_cast<std::string const*>(nullptr)}) {
    auto const l = names_.find(lang ? *lang : std::string("*"));
    if (l == names_.end()) continue;
    auto const it = l->second.find(key);
    if (it != l->second.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<LocationId> Gazetteer::ancestors(LocationId id) const {
  std::vector<LocationId> out;
  auto const* e = find(id);
  while (e && e->parent && out.size() < entries_.size()) {
    out.push_back(*e->parent);
    e = find(*e->parent);
  }
  return out;
}

GeoStopList GeoStopList::load(std::filesystem::path const& dir) {
  GeoStopList list;
  if (!std::filesystem::is_directory(dir)) return list;
  for (auto const& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      line = text::trim(line);
      if (line.empty() || line[0] == '#') continue;
      list.add(entry.path().stem().string(), line);
    }
  }
  return list;
}

void GeoStopList::add(std::string const& language, std::string const& surface) {
  forms_[language].insert(text::lower(text::nfc(surface)));
}

bool GeoStopList::contains(std::string const& language, std::string_view surface) const {
  auto const it = forms_.find(language);
  return it != forms_.end() && it->second.count(text::lower(text::nfc(surface))) > 0;
}

std::vector<GeoMention> geo_parse(std::span<text::Token const> tokens, std::string const& language,
                                  Gazetteer const& gazetteer, GeoStopList const& stop) {
  std::vector<GeoMention> out;
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (auto const& t : tokens) words.push_back(t.text);

  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t taken = 0;
    std::size_t const longest = std::min(gazetteer.max_name_tokens(), words.size() - i);
    for (std::size_t len = longest; len >= 1; --len) {
      std::span<std::string const> const seq(words.data() + i, len);
      auto ids = gazetteer.lookup(language, seq);
      if (ids.empty()) continue;
      std::string surface;
      for (std::size_t k = 0; k < len; ++k) {
        if (k) surface.push_back(' ');
        surface += seq[k];
      }
      if (stop.contains(language, surface)) continue;
      GeoMention m;
      m.surface = std::move(surface);
      m.token_offset = i;
      m.token_count = len;
      m.candidates = std::move(ids);
      out.push_back(std::move(m));
      taken = len;
      break;
    }
    i += taken ? taken : 1;
  }
  return out;
}

std::vector<GeoMention> geo_parse(Article const& article, Gazetteer const& gazetteer, GeoStopList const& stop) {
  auto const tokens = text::tokenize(text::article_text(article.title, article.body));
  return geo_parse(tokens, article.language, gazetteer, stop);
}

double size_score(SizeClass s) {
  switch (s) {
    case SizeClass::Country: return 3.0;
    case SizeClass::Region: return 2.0;
    case SizeClass::Capital: return 3.0;
    case SizeClass::MajorCity: return 2.0;
    case SizeClass::City: return 1.0;
    case SizeClass::Town: return 0.0;
  }
  return 0.0;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kEarthRadiusKm = 6371.0088;
  constexpr double kRad = std::numbers::pi / 180.0;
  double const dlat = (lat2 - lat1) * kRad;
  double const dlon = (lon2 - lon1) * kRad;
  double const a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

std::vector<GeoMention> geo_disambiguate(std::vector<GeoMention> mentions, GeoContext const& context,
                                         Gazetteer const& gazetteer, GeoParams const& params) {
  std::erase_if(mentions, [&](GeoMention const& m) {
    return std::any_of(context.name_spans.begin(), context.name_spans.end(), [&](TokenSpan const& s) {
      return m.token_offset >= s.begin && m.token_offset + m.token_count <= s.end;
    });
  });

  std::vector<GazetteerEntry const*> anchors;
  std::set<std::string> anchor_countries;
  for (auto& m : mentions) {
    if (m.candidates.size() == 1) {
      m.resolved = m.candidates.front();
      if (auto const* e = gazetteer.find(*m.resolved)) {
        anchors.push_back(e);
        anchor_countries.insert(e->country);
      }
    }
  }

  for (auto& m : mentions) {
    if (m.resolved || m.candidates.empty()) continue;
    std::vector<double> nearest(m.candidates.size(), std::numeric_limits<double>::infinity());
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m.candidates.size(); ++k) {
      auto const* e = gazetteer.find(m.candidates[k]);
      if (!e) continue;
      for (auto const* a : anchors) {
        if (a->location_id == e->location_id) continue;
        nearest[k] = std::min(nearest[k], haversine_km(e->latitude, e->longitude, a->latitude, a->longitude));
      }
      closest = std::min(closest, nearest[k]);
    }

    GazetteerEntry const* best = nullptr;
    double best_score = -1.0;
    for (std::size_t k = 0; k < m.candidates.size(); ++k) {
      auto const* e = gazetteer.find(m.candidates[k]);
      if (!e) continue;
      double score = size_score(e->size_class);
      if (e->country == context.source_country || anchor_countries.count(e->country)) score += params.country_bonus;
      if (std::isfinite(closest) && nearest[k] == closest) score += params.distance_bonus;
      bool better = !best || score > best_score;
      if (best && score == best_score) {
        better = e->size_class > best->size_class ||
                 (e->size_class == best->size_class && e->location_id < best->location_id);
      }
      if (better) {
        best = e;
        best_score = score;
      }
    }
    if (best) m.resolved = best->location_id;
  }
  return mentions;
}

std::optional<LocationId> major_location(std::span<GeoMention const> mentions, Gazetteer const& gazetteer,
                                         double hierarchy_credit) {
  std::map<LocationId, double> weight;
  for (auto const& m : mentions) {
    if (!m.resolved) continue;
    weight[*m.resolved] += 1.0;
    double credit = hierarchy_credit;
    for (auto const a : gazetteer.ancestors(*m.resolved)) {
      weight[a] += credit;
      credit *= hierarchy_credit;
    }
  }
  if (weight.empty()) return std::nullopt;
  double top = 0.0;
  for (auto const& [id, w] : weight) top = std::max(top, w);

  std::optional<LocationId> best;
  std::size_t best_depth = 0;
  SizeClass best_size = SizeClass::Town;
  for (auto const& [id, w] : weight) {
    if (w < top - 1e-9) continue;
    auto const* e = gazetteer.find(id);
    std::size_t const depth = gazetteer.ancestors(id).size();
    SizeClass const size = e ? e->size_class : SizeClass::Town;
    if (!best || depth > best_depth || (depth == best_depth && size > best_size)) {
      best = id;
      best_depth = depth;
      best_size = size;
    }
  }
  return best;
}

CountryVector country_vector(std::span<GeoMention const> mentions, Gazetteer const& gazetteer) {
  CountryVector v;
  for (auto const& m : mentions) {
    if (!m.resolved) continue;
    if (auto const* e = gazetteer.find(*m.resolved)) ++v[e->country];
  }
  return v;
}

}  // namespace emm::geo
