#include <doctest.h>

#include "emm/pipeline.hpp"

#include <fstream>
#include <sstream>

using namespace emm;

namespace {

std::filesystem::path fixture_dir() { return std::filesystem::path(EMM_DATA_DIR) / "fixtures" / "bilingual"; }

Config const& fixture_config() {
  static Config const c = Config::load(fixture_dir() / "config.json");
  return c;
}

Resources const& fixture_resources() {
  static Resources const r = Resources::load(fixture_config());
  return r;
}

Timestamp at(char const* s) { return *parse_timestamp(s); }

Timestamp const kRound = at("2024-03-12T09:00:00Z");

std::string article_by_url(State const& s, std::string const& url) {
  for (auto const& [id, a] : s.articles.all()) {
    if (a.url == url) return id;
  }
  FAIL("no article " << url);
  return {};
}

std::string cluster_of(State const& s, std::string const& lang, std::string const& article_id) {
  for (auto const& c : s.clusters.at(lang)) {
    if (std::find(c.members.begin(), c.members.end(), article_id) != c.members.end()) return c.cluster_id;
  }
  return {};
}

std::vector<std::pair<std::string, std::string>> fixture_pairs() {
  std::ifstream in(fixture_dir() / "pairs.tsv");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto const cols = text::split(line, '\t');
    out.emplace_back(cols.at(1), cols.at(2));
  }
  return out;
}

Pipeline fixture_round() {
  Pipeline p(fixture_config(), fixture_resources());
  p.ingest(kRound);
  p.run_round(kRound);
  return p;
}

std::string slurp_dir(std::filesystem::path const& dir) {
  std::vector<std::filesystem::path> files;
  for (auto const& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (auto const& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    all += std::filesystem::relative(f, dir).string() + "\n" + ss.str();
  }
  return all;
}

std::filesystem::path scratch(std::string const& name) {
  auto const p = std::filesystem::temp_directory_path() / ("emm_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("empty store round") {
  Pipeline p(fixture_config(), fixture_resources());
  auto const r = p.run_round(kRound);
  CHECK(r.new_articles == 0);
  CHECK(r.links.empty());
  CHECK(p.state().clusters.empty());
  CHECK(p.state().last_round == kRound);
}

TEST_CASE("bilingual fixture links counterparts") {
  auto const p = fixture_round();
  auto const& s = p.state();
  CHECK(s.articles.size() == 40);
  REQUIRE(s.clusters.count("en"));
  REQUIRE(s.clusters.count("fr"));
  CHECK(!s.profiles.empty());

  auto const edges = s.links.at(day_of(kRound));
  auto const best = xlink::best_edges(edges);
  std::size_t hits = 0;
  for (auto const& [en_url, fr_url] : fixture_pairs()) {
    auto const en = cluster_of(s, "en", article_by_url(s, en_url));
    auto const fr = cluster_of(s, "fr", article_by_url(s, fr_url));
    REQUIRE(!en.empty());
    REQUIRE(!fr.empty());
    auto const it = best.find(en);
    if (it == best.end()) continue;
    auto const& e = it->second;
    if ((e.cluster_a == en ? e.cluster_b : e.cluster_a) == fr) ++hits;
  }
  CHECK(hits == 8);

  // Distractors stay unlinked.
  auto const d1 = cluster_of(s, "en", article_by_url(s, "http://fixture.example/en/d1-1"));
  for (auto const& e : edges) {
    CHECK(e.cluster_a != d1);
    CHECK(e.combined >= fixture_config().tau_link);
  }
}

TEST_CASE("entities and quotes from the fixture") {
  auto const p = fixture_round();
  auto const& s = p.state();
  std::optional<names::EntityId> putin;
  for (auto const& [id, e] : s.entities.all()) {
    if (e.variants.count("Vladimir Putin")) putin = id;
  }
  REQUIRE(putin);
  auto const* e = s.entities.find(*putin);
  CHECK(e->variants.count("Vladimir Poutine"));
  CHECK(e->cluster_refs.size() == 2);

  auto const profile = entity_profile(s, *putin);
  CHECK(profile.clusters_by_language.count("en"));
  CHECK(profile.clusters_by_language.count("fr"));
  REQUIRE(profile.quotes.size() == 2);
  CHECK(profile.quotes[0].quote_text.find("terrorist") != std::string::npos);
  CHECK_THROWS_AS(entity_profile(s, 9999), NotFound);
}

TEST_CASE("rounds are deterministic and idempotent") {
  auto const a = fixture_round();
  auto const b = fixture_round();
  CHECK(a.state() == b.state());

  Pipeline c(fixture_config(), fixture_resources(), a.state());
  c.run_round(kRound);
  CHECK(c.state() == a.state());

  CHECK_THROWS_AS(c.run_round(kRound - kHour), Error);

  auto const da = scratch("det_a"), db = scratch("det_b");
  save_state(a.state(), da);
  save_state(b.state(), db);
  CHECK(slurp_dir(da) == slurp_dir(db));
  std::filesystem::remove_all(da);
  std::filesystem::remove_all(db);
}

TEST_CASE("later round chains stories") {
  auto p = fixture_round();
  auto const first = p.state().clusters.at("en");
  p.run_round(kRound + 10 * kMinute);
  auto const& second = p.state().clusters.at("en");
  REQUIRE(second.size() == first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(second[i].chain_id == first[i].chain_id);
    CHECK(!second[i].fresh_chain);
  }
  CHECK(p.state().previous.at("en") == first);
}

TEST_CASE("disabling subjects zeroes the subject part") {
  auto config = fixture_config();
  config.subjects_enabled = false;
  config.tau_link = 0.3;
  Pipeline p(config, fixture_resources());
  p.ingest(kRound);
  auto const r = p.run_round(kRound);
  CHECK(p.state().profiles.empty());
  REQUIRE(!r.links.empty());
  for (auto const& e : r.links) {
    CHECK(e.parts.subject == 0.0);
    CHECK(e.combined == doctest::Approx(xlink::combine(e.parts)).epsilon(1e-12));
    CHECK(e.combined <= 0.6 + 1e-12);
  }
}
