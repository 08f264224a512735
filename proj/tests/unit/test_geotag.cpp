#include <doctest.h>

#include "emm/geotag.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace emm;
using namespace emm::geo;

namespace {

Gazetteer const& gaz() {
  static Gazetteer const g = Gazetteer::load(std::filesystem::path(EMM_DATA_DIR) / "gazetteer.tsv");
  return g;
}

GeoStopList const& stops() {
  static GeoStopList const s = GeoStopList::load(std::filesystem::path(EMM_DATA_DIR) / "geostop");
  return s;
}

Article art(std::string lang, std::string body, std::string country = "") {
  Article a;
  a.article_id = "a";
  a.language = std::move(lang);
  a.country = std::move(country);
  a.body = std::move(body);
  return a;
}

LocationId only(std::vector<LocationId> const& ids) {
  REQUIRE(ids.size() == 1);
  return ids.front();
}

LocationId id_of(std::string const& lang, std::string const& name, SizeClass size, std::string const& country) {
  std::vector<std::string> const toks{name};
  for (auto id : gaz().lookup(lang, toks)) {
    auto const* e = gaz().find(id);
    if (e->size_class == size && e->country == country) return id;
  }
  FAIL("no such location " << name);
  return 0;
}

// Spherical law of cosines, an independent great-circle formula.
double cosine_law_km(double lat1, double lon1, double lat2, double lon2) {
  double const r = std::numbers::pi / 180.0;
  double const c = std::sin(lat1 * r) * std::sin(lat2 * r) + std::cos(lat1 * r) * std::cos(lat2 * r) * std::cos((lon2 - lon1) * r);
  return 6371.0088 * std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

TEST_CASE("gazetteer loads and validates") {
  CHECK(gaz().size() > 60);
  std::vector<std::string> const w{"Washington"};
  CHECK(gaz().lookup("en", w).size() == 32);

  Gazetteer bad;
  GazetteerEntry city;
  city.location_id = 1;
  city.names["*"] = {"Nowhere"};
  city.size_class = SizeClass::City;
  city.country = "FR";
  bad.add(city);
  CHECK_THROWS_AS(bad.validate(), Error);

  GazetteerEntry off = city;
  off.latitude = 91;
  CHECK_THROWS_AS(bad.add(off), Error);
}

TEST_CASE("geo_parse") {
  auto const sv = geo_parse(art("sv", "By och And ligger nära Stockholm"), gaz(), stops());
  REQUIRE(sv.size() == 1);
  CHECK(sv[0].surface == "Stockholm");

  // Without a stop list the homographs come through.
  GeoStopList const none;
  CHECK(geo_parse(art("sv", "By och And"), gaz(), none).size() == 2);

  auto const iz = geo_parse(art("en", "Protests in Izmir continued."), gaz(), stops());
  REQUIRE(iz.size() == 1);
  CHECK(iz[0].token_offset == 2);
  CHECK(gaz().find(only(iz[0].candidates))->country == "TR");

  CHECK(geo_parse(art("en", "nothing to see here"), gaz(), stops()).empty());

  auto const longest = geo_parse(art("en", "Rain in Washington State and New York"), gaz(), stops());
  REQUIRE(longest.size() == 2);
  CHECK(longest[0].surface == "Washington State");
  CHECK(longest[0].token_count == 2);
  CHECK(longest[1].surface == "New York");

  auto const ru = geo_parse(art("ru", "Встреча в Москве"), gaz(), stops());
  REQUIRE(ru.size() == 1);
  CHECK(gaz().find(only(ru[0].candidates))->country == "RU");
}

TEST_CASE("stopped surfaces never appear") {
  std::mt19937 rng(1);
  std::vector<std::string> const words{"By", "And", "Stockholm", "och", "Paris", "by", "and"};
  for (int i = 0; i < 200; ++i) {
    std::string body;
    for (int k = 0; k < 8; ++k) body += words[rng() % words.size()] + " ";
    for (auto const& m : geo_parse(art("sv", body), gaz(), stops())) {
      CHECK_FALSE(stops().contains("sv", m.surface));
    }
  }
}

TEST_CASE("disambiguation cascade") {
  SUBCASE("inside a person name") {
    auto const a = art("en", "Paris Hilton arrived in Houston");
    auto ms = geo_parse(a, gaz(), stops());
    REQUIRE(ms.size() == 2);
    GeoContext ctx;
    ctx.name_spans = {{0, 2}};
    auto const out = geo_disambiguate(ms, ctx, gaz());
    REQUIRE(out.size() == 1);
    CHECK(out[0].surface == "Houston");
  }
  SUBCASE("source country and size class") {
    auto const a = art("fr", "Manifestation à Paris", "FR");
    GeoContext ctx;
    ctx.source_country = "FR";
    auto const out = geo_disambiguate(geo_parse(a, gaz(), stops()), ctx, gaz());
    REQUIRE(out.size() == 1);
    REQUIRE(out[0].candidates.size() == 2);
    CHECK(out[0].resolved == id_of("fr", "Paris", SizeClass::Capital, "FR"));
  }
  SUBCASE("Washington near Seattle") {
    auto const a = art("en", "Storms hit Seattle and Washington overnight");
    auto const out = geo_disambiguate(geo_parse(a, gaz(), stops()), {}, gaz());
    REQUIRE(out.size() == 2);
    auto const& w = out[1];
    REQUIRE(w.candidates.size() == 32);
    REQUIRE(w.resolved);
    auto const* seattle = gaz().find(*out[0].resolved);
    // Distance oracle: the closest candidate to Seattle.
    LocationId closest = 0;
    double best = 1e18;
    for (auto id : w.candidates) {
      auto const* e = gaz().find(id);
      double const d = cosine_law_km(e->latitude, e->longitude, seattle->latitude, seattle->longitude);
      if (d < best) {
        best = d;
        closest = id;
      }
    }
    CHECK(*w.resolved == closest);
    CHECK(gaz().find(closest)->size_class == SizeClass::Region);
  }
  SUBCASE("Washington alone resolves to the capital") {
    auto const out = geo_disambiguate(geo_parse(art("en", "Talks in Washington"), gaz(), stops()), {}, gaz());
    REQUIRE(out.size() == 1);
    CHECK(out[0].resolved == id_of("en", "Washington", SizeClass::Capital, "US"));
  }
  SUBCASE("deterministic") {
    auto const a = art("en", "Paris, Washington, Seattle, Rome and Paris again", "GB");
    GeoContext ctx;
    ctx.source_country = "GB";
    auto const ms = geo_parse(a, gaz(), stops());
    CHECK(geo_disambiguate(ms, ctx, gaz()) == geo_disambiguate(ms, ctx, gaz()));
  }
}

TEST_CASE("haversine") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> lat(-89, 89), lon(-179, 179);
  for (int i = 0; i < 500; ++i) {
    double const a = lat(rng), b = lon(rng), c = lat(rng), d = lon(rng);
    double const h = haversine_km(a, b, c, d);
    CHECK(h == doctest::Approx(haversine_km(c, d, a, b)).epsilon(1e-12));
    CHECK(h == doctest::Approx(cosine_law_km(a, b, c, d)).epsilon(1e-6));
    CHECK(h > 0.0);
    CHECK(haversine_km(a, b, a, b) == 0.0);
  }
}

namespace {

GeoMention resolved(std::string const& lang, std::string const& name) {
  std::vector<std::string> const toks{name};
  auto ids = gaz().lookup(lang, toks);
  REQUIRE(ids.size() == 1);
  GeoMention m;
  m.surface = name;
  m.candidates = ids;
  m.resolved = ids.front();
  return m;
}

}  // namespace

TEST_CASE("major_location and country_vector") {
  auto const izmir = resolved("en", "Izmir");
  std::vector<GeoMention> const three{izmir, izmir, izmir};
  CHECK(major_location(three, gaz()) == izmir.resolved);

  auto const rome = resolved("en", "Rome");
  auto const milan = resolved("en", "Milan");
  auto const italy = resolved("en", "Italy");
  std::vector<GeoMention> const it{rome, milan, italy, italy};
  CHECK(major_location(it, gaz()) == italy.resolved);
  CHECK(!major_location(std::vector<GeoMention>{}, gaz()));

  auto const ankara = resolved("en", "Ankara");
  std::vector<GeoMention> const tr{izmir, izmir, ankara};
  CHECK(country_vector(tr, gaz()) == CountryVector{{"TR", 3}});
  CHECK(country_vector(std::vector<GeoMention>{}, gaz()).empty());

  auto paris = resolved("fr", "Lyon");
  paris.resolved = id_of("fr", "Paris", SizeClass::Capital, "FR");
  auto washington = resolved("en", "Seattle");
  washington.resolved = id_of("en", "Washington", SizeClass::Capital, "US");
  std::vector<GeoMention> const two{paris, washington};
  CHECK(country_vector(two, gaz()) == CountryVector{{"FR", 1}, {"US", 1}});

  GeoMention unresolved;
  unresolved.candidates = {1, 2};
  std::vector<GeoMention> const with_unresolved{izmir, unresolved};
  auto const cv = country_vector(with_unresolved, gaz());
  int total = 0;
  for (auto const& [c, n] : cv) total += n;
  CHECK(total == 1);
}
