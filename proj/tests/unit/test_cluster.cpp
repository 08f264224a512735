#include <doctest.h>

#include "emm/cluster.hpp"
#include "emm/sparse.hpp"
#include "oracles.hpp"

#include <random>

using namespace emm;
using namespace emm::cluster;
using oracle::random_corpus;
using oracle::reference_agglomerate;

namespace {

Article art(std::string id, std::string body, Timestamp at = 0, std::string source = "s") {
  Article a;
  a.article_id = std::move(id);
  a.source_id = std::move(source);
  a.language = "en";
  a.body = std::move(body);
  a.published_at = at;
  return a;
}

}  // namespace

TEST_CASE("vectorize") {
  FrequencyModel bg;
  for (int i = 0; i < 1000; ++i) bg.add("w" + std::to_string(i), 10);
  bg.set_total(10000);

  CHECK(vectorize(art("a", ""), &bg).empty());

  auto const v = vectorize(art("a", "tsunami tsunami tsunami"), &bg);
  REQUIRE(v.size() == 1);
  CHECK(v.at("tsunami") > 0.0);

  // Token at exactly its background rate.
  FrequencyModel flat;
  flat.add("a", 50);
  flat.add("b", 50);
  flat.set_total(100);
  auto const eq = vectorize(art("a", "a b"), &flat);
  CHECK(eq.empty());

  Diagnostics diags;
  auto const tf = vectorize(art("a", "Flood flood warning 2009"), nullptr, &diags);
  CHECK(diags.size() == 1);
  CHECK(tf.at("flood") == 2.0);
  CHECK(tf.count("2009") == 0);
}

TEST_CASE("cosine basics") {
  KeywordVector const u{{"a", 0.3}, {"b", 1.7}, {"c", 2.0}};
  CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-9));
  KeywordVector const w{{"d", 1.0}};
  CHECK(cosine(u, w) == 0.0);
}

TEST_CASE("single article and identical pair plus orthogonal") {
  std::vector<KeywordVector> const one{{{"x", 1.0}}};
  CHECK(agglomerate(one, 0.5) == std::vector<std::vector<std::size_t>>{{0}});

  std::vector<KeywordVector> const three{{{"flood", 2.0}, {"rain", 1.0}}, {{"flood", 2.0}, {"rain", 1.0}}, {{"vote", 1.0}}};
  auto const g = agglomerate(three, 0.5);
  REQUIRE(g.size() == 2);
  CHECK(g[0] == std::vector<std::size_t>{0, 1});
  CHECK(g[1] == std::vector<std::size_t>{2});
}

TEST_CASE("agglomerate equals the exhaustive reference on small corpora") {
  std::mt19937 rng(42);
  int merges = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    std::size_t const n = 1 + static_cast<std::size_t>(trial % 8);
    auto const corpus = random_corpus(rng, n);
    for (double theta : {0.3, 0.5, 0.8}) {
      auto const got = agglomerate(corpus, theta);
      auto const want = reference_agglomerate(corpus, theta);
      if (got != want) {
        for (auto const& v : corpus) {
          std::string line;
          for (auto const& [k, w] : v) line += k + ":" + std::to_string(w) + " ";
          MESSAGE(line);
        }
        auto show = [](auto const& gs) {
          std::string out;
          for (auto const& g : gs) {
            out += "{";
            for (auto i : g) out += std::to_string(i) + " ";
            out += "}";
          }
          return out;
        };
        MESSAGE("theta " << theta << " got " << show(got) << " want " << show(want));
      }
      REQUIRE(got == want);
      merges += static_cast<int>(n - got.size());
    }
  }
  CHECK(merges > 1000);
}

TEST_CASE("clustering is invariant under uniform scaling and partitions the input") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    auto corpus = random_corpus(rng, 30);
    auto const base = agglomerate(corpus, 0.5);
    for (auto& v : corpus) {
      for (auto& [k, w] : v) w *= 7.25;
    }
    CHECK(agglomerate(corpus, 0.5) == base);
    std::vector<int> seen(30, 0);
    for (auto const& g : base) {
      for (auto i : g) ++seen[i];
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  }
}

TEST_CASE("cluster_window builds ids, medoids and centroids") {
  std::vector<Article> arts{art("b", "flood rain river", 200), art("a", "flood rain river", 100),
                            art("c", "flood rain", 50), art("d", "election vote", 10)};
  std::vector<Article const*> ptrs;
  std::vector<KeywordVector> vecs;
  for (auto const& a : arts) {
    ptrs.push_back(&a);
    vecs.push_back(term_frequency(content_tokens(a)));
  }
  auto const cs = cluster_window(ptrs, vecs, 0.5, 1000);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].cluster_id == "en-1000-0");
  CHECK(cs[0].members == std::vector<std::string>{"a", "b", "c"});
  // a and b are equally close to the centroid; a is older.
  CHECK(cs[0].medoid_article_id == "a");
  double norm = 0.0;
  for (auto const& [k, w] : cs[0].centroid) norm += w * w;
  CHECK(norm == doctest::Approx(1.0));
  CHECK(cs[1].members == std::vector<std::string>{"d"});
  CHECK(cs[1].medoid_article_id == "d");
}

TEST_CASE("select_window extends to the minimum article count") {
  std::vector<Article> arts;
  for (int i = 0; i < 30; ++i) arts.push_back(art("a" + std::to_string(100 + i), "x", i * kHour));
  std::vector<Article const*> ptrs;
  for (auto const& a : arts) ptrs.push_back(&a);
  Timestamp const now = 29 * kHour;
  CHECK(select_window(ptrs, now, 4 * kHour, 0).size() == 4);
  CHECK(select_window(ptrs, now, 4 * kHour, 20).size() == 20);
  CHECK(select_window(ptrs, now, 4 * kHour, 100).size() == 30);
  CHECK(select_window(ptrs, 10 * kHour, 4 * kHour, 0).size() == 4);
}

namespace {

Cluster make_cluster(std::string id, std::vector<std::string> members, Timestamp round = 0) {
  Cluster c;
  c.cluster_id = std::move(id);
  c.language = "en";
  c.round = round;
  c.members = std::move(members);
  std::sort(c.members.begin(), c.members.end());
  return c;
}

std::vector<std::string> ids(std::string prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("chaining at the 10% boundary") {
  auto prev = make_cluster("p", ids("old", 5), 0);
  prev.chain_id = "story-p";
  prev.size_history = {{0, 5}};
  std::vector<Cluster> const previous{prev};

  auto members = ids("new", 9);
  members.push_back("old0");
  std::vector<Cluster> cur{make_cluster("c", members, 600)};
  std::set<std::string> window(members.begin(), members.end());
  chain_clusters(cur, previous, window);
  CHECK_FALSE(cur[0].fresh_chain);
  CHECK(cur[0].chain_id == "story-p");
  CHECK(cur[0].attached == std::vector<std::string>{"old1", "old2", "old3", "old4"});
  CHECK(cur[0].size_history == std::vector<SizePoint>{{0, 5}, {600, 14}});

  std::vector<Cluster> none{make_cluster("c", ids("new", 10), 600)};
  chain_clusters(none, previous, window);
  CHECK(none[0].fresh_chain);
  CHECK(none[0].chain_id == "story-c");
  CHECK(none[0].attached.empty());

  // 1 of 11 is below 10%.
  auto eleven = ids("new", 10);
  eleven.push_back("old0");
  std::vector<Cluster> below{make_cluster("c", eleven, 600)};
  chain_clusters(below, previous, window);
  CHECK(below[0].fresh_chain);
}

TEST_CASE("chaining picks the largest overlap fraction") {
  auto p1 = make_cluster("p1", ids("x", 6), 0);
  p1.chain_id = "story-p1";
  auto p2 = make_cluster("p2", ids("y", 6), 0);
  p2.chain_id = "story-p2";
  auto members = ids("n", 7);
  for (auto const& id : {"y0", "y1", "y2"}) members.push_back(id);
  std::vector<Cluster> cur{make_cluster("c", members, 600)};
  std::vector<Cluster> const previous{p1, p2};
  chain_clusters(cur, previous, {});
  CHECK(cur[0].chain_id == "story-p2");

  // Equal fractions: larger predecessor wins, then the older chain.
  auto q1 = make_cluster("q1", ids("q", 3), 0);
  q1.chain_id = "story-q1";
  q1.chain_started = 100;
  auto q2 = make_cluster("q2", {"q0", "r1", "r2", "r3"}, 0);
  q2.chain_id = "story-q2";
  q2.chain_started = 200;
  auto q3 = make_cluster("q3", {"q1", "s1", "s2", "s3"}, 0);
  q3.chain_id = "story-q3";
  q3.chain_started = 50;
  std::vector<Cluster> cur2{make_cluster("c", {"q0", "q1", "q2", "z"}, 600)};
  std::vector<Cluster> const prev2{q1, q2, q3};
  chain_clusters(cur2, prev2, {});
  CHECK(cur2[0].chain_id == "story-q1");  // 3/4 beats 1/4

  std::vector<Cluster> cur3{make_cluster("c", {"q0", "q1", "z"}, 600)};
  std::vector<Cluster> const prev3{q2, q3};
  chain_clusters(cur3, prev3, {});
  CHECK(cur3[0].chain_id == "story-q3");  // same size, older chain
}

TEST_CASE("breaking news") {
  BreakingParams const params;
  Timestamp const now = 10 * kHour;

  auto fresh = make_cluster("c", ids("a", 12), now);
  fresh.fresh_chain = true;
  fresh.size_history = {{now, 12}};
  auto const flag = detect_breaking(fresh, 8, now, params);
  REQUIRE(flag);
  CHECK(flag->reason == BreakingReason::NewLarge);
  CHECK(to_string(flag->reason) == "new-large");
  CHECK_FALSE(detect_breaking(fresh, 4, now, params));

  // Steady one article per 30 minutes.
  auto steady = make_cluster("s", ids("a", 10), now);
  steady.fresh_chain = false;
  for (int i = 0; i <= 9; ++i) steady.size_history.push_back({now - (9 - i) * 30 * kMinute, static_cast<std::size_t>(i + 1)});
  CHECK_FALSE(detect_breaking(steady, 8, now, params));

  // Baseline 1 per 30 minutes, then 6 in the last 30 minutes.
  auto rising = make_cluster("r", ids("a", 14), now);
  rising.fresh_chain = false;
  for (int i = 0; i <= 8; ++i) rising.size_history.push_back({now - (9 - i) * 30 * kMinute, static_cast<std::size_t>(i)});
  rising.size_history.push_back({now, 14});
  auto const rise = detect_breaking(rising, 3, now, params);
  REQUIRE(rise);
  CHECK(rise->reason == BreakingReason::RapidRise);
  CHECK(rise->articles_30min == 6);
}
