// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "emm/pipeline.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace emm;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path data_dir() { return EMM_DATA_DIR; }
fs::path fixture_dir() { return data_dir() / "fixtures" / "bilingual"; }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

names::NameNormalizer const& normalizer() {
  static names::NameNormalizer const n = names::NameNormalizer::load(data_dir() / "names");
  return n;
}

// ---------------------------------------------------------------- 1

Outcome weight_scheme() {
  xlink::LinkWeights const w;
  std::array<xlink::LinkParts, 4> const parts{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
  std::array<double, 4> const want{0.4, 0.3, 0.2, 0.1};

  // Signatures that agree in exactly one ingredient and are orthogonal in the rest.
  xlink::ClusterSignature base;
  base.subject = {{1001, 1.0}};
  base.country = {{"TR", 1}};
  base.entity = {{1, 1}};
  base.keyword = {{"quake", 1.0}};
  auto other = [&](int keep) {
    xlink::ClusterSignature s;
    s.subject = keep == 0 ? base.subject : subject::SubjectVector{{1002, 1.0}};
    s.country = keep == 1 ? base.country : geo::CountryVector{{"FR", 1}};
    s.entity = keep == 2 ? base.entity : names::EntityVector{{2, 1}};
    s.keyword = keep == 3 ? base.keyword : cluster::KeywordVector{{"vote", 1.0}};
    return s;
  };

  double worst = 0.0;
  std::string got;
  for (int i = 0; i < 4; ++i) {
    double const c = xlink::combine(parts[static_cast<std::size_t>(i)], w);
    double const s = xlink::link_score(base, other(i), w).combined;
    worst = std::max({worst, std::abs(c - want[static_cast<std::size_t>(i)]), std::abs(s - want[static_cast<std::size_t>(i)])});
    got += (i ? ", " : "") + fmt(s);
  }
  return {worst <= 1e-12, "combined = " + got + "; max error " + fmt(worst)};
}

// ---------------------------------------------------------------- 2

Outcome language_pairs() {
  bool ok = true;
  std::size_t at19 = 0;
  for (std::size_t n = 2; n <= 19; ++n) {
    xlink::ClustersByLanguage by_lang;
    for (std::size_t l = 0; l < n; ++l) {
      std::string const lang = "l" + std::to_string(l);
      xlink::SignedCluster c;
      c.cluster_id = lang + "-0";
      c.signature.keyword = {{"shared", 1.0}};
      c.signature.country = {{"TR", 1}};
      by_lang[lang] = {c};
    }
    auto const r = xlink::link_clusters(by_lang);
    std::size_t const want = n * (n - 1) / 2;
    // Every pair of singletons agrees on country and keyword: 0.4 combined, one edge per pair at tau 0.4.
    auto const edges = xlink::link_clusters(by_lang, 0.4).edges.size();
    ok = ok && r.language_pairs == want && edges == want;
    if (n == 19) at19 = r.language_pairs;
  }
  return {ok && at19 == 171, "N(N-1)/2 pairs for N = 2..19; " + std::to_string(at19) + " at N = 19"};
}

// ---------------------------------------------------------------- 3

Outcome variant_fusion() {
  auto const config = Config::defaults(data_dir());
  names::MergeParams params;
  params.threshold = config.tau_name;
  names::EntityStore store;
  std::vector<std::optional<names::EntityId>> ids;
  for (char const* v : {"Ali Chamenei", "Ali Jamenei", "Али Хаменеи"}) {
    names::NameMention m;
    m.surface = v;
    ids.push_back(store.merge_variant(m, normalizer(), params));
  }
  bool const ok = ids[0] && ids[0] == ids[1] && ids[1] == ids[2] && store.size() == 1;
  return {ok, "entity ids " + std::to_string(ids[0].value_or(-1)) + ", " + std::to_string(ids[1].value_or(-1)) + ", " +
                  std::to_string(ids[2].value_or(-1)) + " at tau_name " + fmt(params.threshold)};
}

// ---------------------------------------------------------------- 4

Outcome normalisation_pairs() {
  std::vector<std::pair<std::string, std::string>> const pairs{
      {"Mohammed", "Mohamed"}, {"Barack", "Barrak"}, {"Ivanov", "Ivanow"}, {"Wałęsa", "Walesa"}};
  bool ok = true;
  std::string detail;
  for (auto const& [a, b] : pairs) {
    auto const ca = normalizer().canonicalize(a), cb = normalizer().canonicalize(b);
    ok = ok && ca == cb;
    detail += (detail.empty() ? "" : ", ") + a + "/" + b + " -> " + ca + (ca == cb ? "" : " vs " + cb);
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 5

Outcome wildcard_matching() {
  auto const t = catdsl::make_term("tuber_ul%");
  bool ok = true;
  for (char const* w : {"tuberculosis", "Tuberkulose", "tuberculose", "tuberculeux"}) {
    ok = ok && catdsl::match_term(t, catdsl::match_tokens("", w)).size() == 1;
  }
  ok = ok && catdsl::match_term(t, catdsl::match_tokens("", "tubercle")).empty();
  auto const lower = catdsl::make_term("aids"), upper = catdsl::make_term("AIDS");
  auto const tok_upper = catdsl::match_tokens("", "AIDS"), tok_lower = catdsl::match_tokens("", "aids");
  bool const cases = catdsl::match_term(lower, tok_upper).size() == 1 && catdsl::match_term(lower, tok_lower).size() == 1 &&
                     catdsl::match_term(upper, tok_upper).size() == 1 && catdsl::match_term(upper, tok_lower).empty();
  return {ok && cases, std::string("cognates ") + (ok ? "ok" : "wrong") + "; case rule " + (cases ? "ok" : "wrong")};
}

// ---------------------------------------------------------------- 6

Outcome quotation() {
  auto const params = names::NameParams::load(data_dir() / "names");
  Article a;
  a.article_id = "q";
  a.language = "en";
  a.body = "John Smith, supporting AFG, said: \"They are the best!\"";
  auto const marks = quotes::default_quote_marks();
  auto const qs = quotes::extract_quotes(a, params.get("en"), marks);
  if (qs.size() != 1) return {false, std::to_string(qs.size()) + " quotes"};
  auto const& q = qs[0];
  bool const ok = q.speaker == "John Smith" && q.verb == "said" && q.quote_text == "They are the best!";
  return {ok, "(" + q.speaker + ", " + q.verb + ", " + q.quote_text + ")"};
}

// ---------------------------------------------------------------- 7

cluster::Cluster make_cluster(std::string id, std::vector<std::string> members, Timestamp round) {
  cluster::Cluster c;
  c.cluster_id = std::move(id);
  c.language = "en";
  c.round = round;
  std::sort(members.begin(), members.end());
  c.members = std::move(members);
  return c;
}

std::vector<std::string> ids(std::string const& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Outcome chaining_boundary() {
  auto prev = make_cluster("p", ids("old", 5), 0);
  prev.chain_id = "story-p";
  prev.size_history = {{0, 5}};
  std::vector<cluster::Cluster> const previous{prev};

  auto one = ids("new", 9);
  one.push_back("old0");
  std::set<std::string> window(one.begin(), one.end());
  std::vector<cluster::Cluster> shares_one{make_cluster("c", one, 600)};
  cluster::chain_clusters(shares_one, previous, window);

  std::vector<cluster::Cluster> shares_none{make_cluster("c", ids("new", 10), 600)};
  cluster::chain_clusters(shares_none, previous, window);

  bool const ok = shares_one[0].chain_id == "story-p" && !shares_one[0].fresh_chain && shares_none[0].fresh_chain &&
                  shares_none[0].chain_id != "story-p";
  return {ok, "1 of 10 shared -> " + shares_one[0].chain_id + "; 0 of 10 -> " + shares_none[0].chain_id};
}

// ---------------------------------------------------------------- 8

Outcome country_vector() {
  auto const config = Config::defaults(data_dir());
  auto const resources = Resources::load(config);
  Pipeline p(config, resources);
  Article a;
  a.source_id = "wire";
  a.language = "en";
  a.published_at = make_utc(2024, 3, 12, 8);
  a.title = "Strong earthquake shakes Izmir";
  a.body = "Rescue teams reached Izmir after the strong earthquake.";
  a.url = "http://example.org/1";
  a.article_id = make_article_id(a.source_id, a.url, a.title);
  Article b = a;
  b.title = "Strong earthquake: rescue teams sent";
  b.body = "The government in Ankara sent rescue teams after the strong earthquake.";
  b.url = "http://example.org/2";
  b.article_id = make_article_id(b.source_id, b.url, b.title);
  p.add_article(a);
  p.add_article(b);
  p.run_round(make_utc(2024, 3, 12, 9));
  auto const& clusters = p.state().clusters.at("en");
  if (clusters.size() != 1) return {false, std::to_string(clusters.size()) + " clusters instead of 1"};
  auto const cv = p.signature(clusters[0]).country;
  std::string detail;
  for (auto const& [c, n] : cv) detail += (detail.empty() ? "" : ", ") + c + ":" + std::to_string(n);
  return {cv == geo::CountryVector{{"TR", 3}}, "{" + detail + "}"};
}

// ---------------------------------------------------------------- 9 and 12

Config const& fixture_config() {
  static Config const c = Config::load(fixture_dir() / "config.json");
  return c;
}

Resources const& fixture_resources() {
  static Resources const r = Resources::load(fixture_config());
  return r;
}

Timestamp const kFixtureRound = make_utc(2024, 3, 12, 9);

State fixture_run() {
  Pipeline p(fixture_config(), fixture_resources());
  p.ingest(kFixtureRound);
  p.run_round(kFixtureRound);
  return p.state();
}

std::string cluster_with(State const& s, std::string const& lang, std::string const& url) {
  std::string id;
  for (auto const& [aid, a] : s.articles.all()) {
    if (a.url == url) id = aid;
  }
  for (auto const& c : s.clusters.at(lang)) {
    if (std::find(c.members.begin(), c.members.end(), id) != c.members.end()) return c.cluster_id;
  }
  return {};
}

Outcome cross_lingual_linking() {
  auto const s = fixture_run();
  auto const day = day_of(kFixtureRound);
  auto const it = s.links.find(day);
  if (it == s.links.end()) return {false, "no link edges"};
  auto const best = xlink::best_edges(it->second);

  std::ifstream in(fixture_dir() / "pairs.tsv");
  std::size_t pairs = 0, hits = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    auto const cols = text::split(line, '\t');
    ++pairs;
    auto const en = cluster_with(s, "en", cols.at(1));
    auto const fr = cluster_with(s, "fr", cols.at(2));
    auto const b = best.find(en);
    if (b == best.end()) continue;
    auto const& e = b->second;
    if ((e.cluster_a == en ? e.cluster_b : e.cluster_a) == fr) ++hits;
  }
  double const rate = pairs ? static_cast<double>(hits) / static_cast<double>(pairs) : 0.0;
  return {pairs > 0 && rate >= 0.9, std::to_string(hits) + "/" + std::to_string(pairs) + " counterparts are the top edge (" +
                                        fmt(100.0 * rate) + "%), " + std::to_string(it->second.size()) + " edges"};
}

std::string dir_bytes(fs::path const& dir) {
  std::vector<fs::path> files;
  for (auto const& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string all;
  for (auto const& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    all += fs::relative(f, dir).string() + '\0' + ss.str() + '\0';
  }
  return all;
}

State fixture_day() {
  Pipeline p(fixture_config(), fixture_resources());
  for (Timestamp t = make_utc(2024, 3, 12, 6); t <= make_utc(2024, 3, 12, 12); t += fixture_config().cadence) {
    p.ingest(t);
    p.run_round(t);
  }
  return p.state();
}

Outcome determinism() {
  auto const root = fs::temp_directory_path() / "emm_acceptance_determinism";
  fs::remove_all(root);
  auto const a = fixture_day();
  auto const b = fixture_day();
  save_state(a, root / "a");
  save_state(b, root / "b");
  auto const bytes_a = dir_bytes(root / "a");
  bool const identical = bytes_a == dir_bytes(root / "b");
  bool const round_trip = load_state(root / "a") == a;

  // Reload and save again: the files do not change.
  save_state(load_state(root / "a"), root / "c");
  bool const stable = dir_bytes(root / "c") == bytes_a;
  fs::remove_all(root);
  return {identical && round_trip && stable, std::string("two runs of 37 rounds ") + (identical ? "byte-identical" : "differ") +
                                                 ", " + std::to_string(bytes_a.size()) + " bytes; round trip " +
                                                 (round_trip && stable ? "exact" : "lossy")};
}

// ---------------------------------------------------------------- 10

Outcome oracles() {
  auto const strs = oracle::all_strings("abc", 6);
  std::size_t lev_pairs = 0, lev_bad = 0;
  for (auto const& x : strs) {
    for (auto const& y : strs) {
      ++lev_pairs;
      if (names::levenshtein(x, y) != oracle::edit_distance(x, y)) ++lev_bad;
    }
  }

  std::mt19937 rng(42);
  std::size_t corpora = 0, clu_bad = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t const n = 1 + static_cast<std::size_t>(trial % 8);
    auto const corpus = oracle::random_corpus(rng, n);
    for (double theta : {0.3, 0.5, 0.8}) {
      ++corpora;
      if (cluster::agglomerate(corpus, theta) != oracle::reference_agglomerate(corpus, theta)) ++clu_bad;
    }
  }

  std::mt19937 trng(11);
  std::uniform_int_distribution<int> cell(0, 1000);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    double const a = cell(trng), b = cell(trng), c = cell(trng), d = cell(trng);
    worst = std::max(worst, std::abs(g2(a, b, c, d) - oracle::g2_longhand(a, b, c, d)));
  }
  return {lev_bad == 0 && clu_bad == 0 && worst <= 1e-9,
          "levenshtein " + std::to_string(lev_pairs - lev_bad) + "/" + std::to_string(lev_pairs) + " pairs; clustering " +
              std::to_string(corpora - clu_bad) + "/" + std::to_string(corpora) + " corpora; G2 max error " + fmt(worst)};
}

// ---------------------------------------------------------------- 11

Day const kMonday = day_of(make_utc(2024, 1, 1));

void feed(alerts::AlertStore& s, std::string const& country, std::string const& cat, Day d, int n, int& serial) {
  for (int i = 0; i < n; ++i) {
    s.add("a" + std::to_string(serial++), {country}, {cat}, day_start(d) + 3600 + (i * 37) % 80000);
  }
}

Outcome alert_logic() {
  int serial = 0;
  alerts::AlertStore uniform;
  std::vector<std::string> const countries{"PL", "DE", "FR"}, cats{"tuberculosis", "flood"};
  for (int d = 0; d < 15; ++d) {
    for (auto const& c : countries) {
      for (auto const& k : cats) feed(uniform, c, k, kMonday + d, c == "DE" && k == "flood" && d == 14 ? 40 : 10, serial);
    }
  }
  auto const raised = uniform.evaluate(day_start(kMonday + 15));
  bool const surge = raised.size() == 1 && raised[0].key == alerts::AlertKey{"DE", "flood"} &&
                     uniform.evaluate(day_start(kMonday + 15)).empty();

  // Eight weeks where Sundays carry half the volume, then a Sunday at 1.2x a weekday.
  alerts::AlertStore sundays;
  Day const surge_day = kMonday + 62;
  for (Day d = kMonday; d < surge_day; ++d) feed(sundays, "PL", "flood", d, weekday(d) == 6 ? 5 : 10, serial);
  feed(sundays, "PL", "flood", surge_day, 12, serial);
  alerts::AlertParams with, without;
  without.weekday_normalization = false;
  auto const a = sundays.check({"PL", "flood"}, day_start(surge_day + 1), with);
  auto const b = sundays.check({"PL", "flood"}, day_start(surge_day + 1), without);
  bool const weekday_ok = weekday(surge_day) == 6 && a && !b;
  return {surge && weekday_ok, std::string("uniform surge: ") + std::to_string(raised.size()) + " alert" +
                                   (raised.empty() ? "" : " for " + raised[0].key.country + "/" + raised[0].key.category) +
                                   "; Sunday surge level " + (a ? fmt(a->level) : "none") + " normalised, " +
                                   (b ? fmt(b->level) : "no alert") + " raw"};
}

// ---------------------------------------------------------------- 13

std::string synthetic_feed(std::size_t n, std::size_t events, std::mt19937& rng) {
  std::uniform_int_distribution<int> background(0, 3999);
  std::uniform_int_distribution<int> topical(0, 11);
  std::string xml = "<?xml version=\"1.0\"?><rss version=\"2.0\"><channel><title>synthetic</title>\n";
  Timestamp const start = make_utc(2024, 3, 12, 8);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t const e = i % events;
    std::string title = "event" + std::to_string(e) + " topic" + std::to_string(e) + "x";
    std::string body;
    for (int k = 0; k < 25; ++k) body += "ev" + std::to_string(e) + "w" + std::to_string(topical(rng)) + " ";
    for (int k = 0; k < 40; ++k) body += "bg" + std::to_string(background(rng)) + " ";
    xml += "<item><title>" + title + "</title><link>http://synthetic.example/" + std::to_string(i) + "</link><pubDate>" +
           format_rfc822(start + static_cast<Timestamp>(i % 14400)) + "</pubDate><description>" + body +
           "</description></item>\n";
  }
  return xml + "</channel></rss>\n";
}

std::vector<catdsl::CategoryDefinition> synthetic_categories(std::size_t n) {
  std::vector<catdsl::CategoryDefinition> defs;
  for (std::size_t i = 0; i < n; ++i) {
    std::string const src = "ev" + std::to_string(i) + "w1% AND (ev" + std::to_string(i) + "w2 OR bg" +
                            std::to_string(i * 7) + "%) AND NOT bg" + std::to_string(3999 - i);
    defs.push_back(catdsl::parse_definition(src, "c" + std::to_string(i)));
  }
  return defs;
}

Outcome throughput() {
  std::mt19937 rng(13);
  auto const xml = synthetic_feed(10000, 200, rng);
  auto const t0 = std::chrono::steady_clock::now();

  SourceDescriptor source;
  source.source_id = "synthetic";
  source.language = "en";
  source.country = "GB";
  auto const parsed = parse_feed(xml, source.source_id);
  ArticleStore store;
  for (auto const& item : parsed.items) store.insert(normalize_article(item, source));

  catdsl::CategoryMatcher const matcher(synthetic_categories(100));
  std::size_t tagged = 0;
  std::vector<Article const*> articles;
  for (auto const& [id, a] : store.all()) {
    if (!matcher.classify(a).empty()) ++tagged;
    articles.push_back(&a);
  }

  std::vector<cluster::KeywordVector> vectors;
  vectors.reserve(articles.size());
  for (auto const* a : articles) vectors.push_back(cluster::vectorize(*a, nullptr));
  auto const clusters = cluster::cluster_window(articles, vectors, 0.5, make_utc(2024, 3, 12, 12));
  double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool const sane = store.size() == 10000 && tagged > 0 && !clusters.empty();
  return {sane && secs < 60.0, std::to_string(store.size()) + " articles, " + std::to_string(tagged) + " categorised, " +
                                   std::to_string(clusters.size()) + " clusters in " + fmt(secs) + " s"};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> const criteria{
      {"weight scheme", weight_scheme},
      {"language-pair count", language_pairs},
      {"name-variant fusion", variant_fusion},
      {"normalisation pairs", normalisation_pairs},
      {"wildcard and case matching", wildcard_matching},
      {"quotation extraction", quotation},
      {"chaining boundary", chaining_boundary},
      {"country vector", country_vector},
      {"cross-lingual linking", cross_lingual_linking},
      {"oracles", oracles},
      {"alert logic", alert_logic},
      {"determinism and persistence", determinism},
      {"throughput", throughput},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto const& [name, run] = criteria[i];
    auto const t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (std::exception const& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " AC" << (i + 1) << " " << name << ": " << o.detail << " [" << fmt(secs)
              << " s]" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed;
}
