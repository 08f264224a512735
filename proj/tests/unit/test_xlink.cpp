#include <doctest.h>

#include "emm/sparse.hpp"
#include "emm/xlink.hpp"

#include <cmath>
#include <random>

using namespace emm;
using namespace emm::xlink;

namespace {

ClusterSignature sig(subject::SubjectVector s, geo::CountryVector c, names::EntityVector e, cluster::KeywordVector k) {
  return {std::move(s), std::move(c), std::move(e), std::move(k)};
}

ClusterSignature random_sig(std::mt19937& rng) {
  std::uniform_int_distribution<int> key(0, 5);
  std::uniform_real_distribution<double> w(0.0, 3.0);
  ClusterSignature s;
  for (int i = 0; i < 3; ++i) {
    if (rng() % 2) s.subject[1000 + key(rng)] = w(rng);
    if (rng() % 2) s.country[std::string(1, static_cast<char>('A' + key(rng))) + "X"] = 1 + key(rng);
    if (rng() % 2) s.entity[key(rng)] = 1 + key(rng);
    if (rng() % 2) s.keyword["k" + std::to_string(key(rng))] = w(rng);
  }
  return s;
}

}  // namespace

TEST_CASE("cosine examples") {
  std::map<std::string, double> const u{{"a", 1}, {"b", 1}}, v{{"a", 1}}, w{{"c", 2}}, empty;
  CHECK(cosine(u, u) == doctest::Approx(1.0));
  CHECK(cosine(u, w) == 0.0);
  CHECK(cosine(u, v) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(cosine(u, empty) == 0.0);
}

TEST_CASE("ingredient weights") {
  auto const one = sig({{1, 1.0}}, {{"TR", 3}}, {{7, 2}}, {{"izmir", 1.5}});
  auto const none = sig({}, {}, {}, {});
  CHECK(link_score(one, one).combined == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(link_score(one, none).combined == 0.0);
  CHECK(combine({1, 0, 0, 0}) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(combine({0, 1, 0, 0}) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(combine({0, 0, 1, 0}) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(combine({0, 0, 0, 1}) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(combine({0, 1, 1, 0}) == doctest::Approx(0.5).epsilon(1e-12));

  auto const subj_only = link_score(sig({{1, 1.0}}, {}, {}, {}), sig({{1, 0.5}}, {{"FR", 1}}, {}, {}));
  CHECK(std::abs(subj_only.combined - 0.4) <= 1e-12);
}

TEST_CASE("link_score properties") {
  std::mt19937 rng(9);
  for (int i = 0; i < 500; ++i) {
    auto const a = random_sig(rng), b = random_sig(rng);
    auto const ab = link_score(a, b), ba = link_score(b, a);
    CHECK(ab.combined == ba.combined);
    CHECK(ab.parts == ba.parts);
    CHECK(ab.combined >= 0.0);
    CHECK(ab.combined <= 1.0 + 1e-12);
    CHECK(std::abs(ab.combined - combine(ab.parts)) <= 1e-9);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    LinkParts p{u(rng), u(rng), u(rng), u(rng)};
    LinkParts q = p;
    switch (i % 4) {
      case 0: q.subject = std::max(p.subject, u(rng)); break;
      case 1: q.country = std::max(p.country, u(rng)); break;
      case 2: q.entity = std::max(p.entity, u(rng)); break;
      default: q.keyword = std::max(p.keyword, u(rng)); break;
    }
    CHECK(combine(q) >= combine(p));
  }
}

TEST_CASE("language pairs") {
  for (std::size_t n = 1; n <= 25; ++n) {
    ClustersByLanguage by;
    for (std::size_t i = 0; i < n; ++i) by["l" + std::to_string(100 + i)] = {};
    auto const r = link_clusters(by);
    CHECK(r.language_pairs == n * (n - 1) / 2);
    CHECK(language_pair_count(n) == n * (n - 1) / 2);
  }
  CHECK(language_pair_count(19) == 171);

  auto const s = sig({{1, 1.0}}, {{"TR", 2}}, {{3, 1}}, {{"izmir", 1.0}});
  ClustersByLanguage two{{"en", {{"en-1", s}}}, {"fr", {{"fr-1", s}, {"fr-2", sig({}, {{"JP", 1}}, {}, {})}}}};
  auto const r = link_clusters(two, 0.5);
  REQUIRE(r.edges.size() == 1);
  CHECK(r.edges[0].cluster_a == "en-1");
  CHECK(r.edges[0].cluster_b == "fr-1");
  CHECK(r.edges[0].combined == doctest::Approx(1.0));

  ClustersByLanguage one{{"en", {{"en-1", s}, {"en-2", s}}}};
  CHECK(link_clusters(one).edges.empty());
  CHECK(link_clusters(one).language_pairs == 0);
}

TEST_CASE("best_edges") {
  std::vector<LinkEdge> const edges{{"a", "en", "x", "fr", 0.6, {}}, {"a", "en", "y", "fr", 0.9, {}},
                                    {"b", "en", "y", "fr", 0.9, {}}};
  auto const best = best_edges(edges);
  CHECK(best.at("a").cluster_b == "y");
  CHECK(best.at("x").cluster_a == "a");
  CHECK(best.at("y").cluster_a == "a");
}

TEST_CASE("fused entity profile") {
  names::EntityStore store;
  names::Entity e;
  e.entity_id = 1;
  e.primary = e.primary_latin = "Ali Khamenei";
  e.canonical = "l hmn";
  e.variants = {"Ali Khamenei", "Али Хаменеи"};
  e.cluster_refs = {"en-1-0", "ru-1-0"};
  store.insert(e);
  names::Entity f;
  f.entity_id = 2;
  f.primary = f.primary_latin = "John Smith";
  f.canonical = "jhn smt";
  f.variants = {"John Smith"};
  store.insert(f);

  std::vector<quotes::QuoteRecord> qs(3);
  qs[0].entity_id = 1;
  qs[0].quote_text = "one";
  qs[1].entity_id = 2;
  qs[2].entity_id = 1;
  qs[2].quote_text = "два";
  std::vector<std::set<names::EntityId>> const clusters{{1, 2}};
  auto const co = names::cooccurrence(clusters);
  std::map<std::string, std::string> const langs{{"en-1-0", "en"}, {"ru-1-0", "ru"}};

  auto const p = fuse_entity_profile(1, store, langs, qs, co);
  CHECK(p.entity.variants.size() == 2);
  CHECK(p.clusters_by_language.size() == 2);
  CHECK(p.quotes.size() == 2);
  REQUIRE(p.cooccurring.size() == 1);
  CHECK(p.cooccurring[0].first == 2);
  CHECK_THROWS_AS(fuse_entity_profile(99, store, langs, qs, co), NotFound);
}
