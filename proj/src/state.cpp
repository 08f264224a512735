#include "emm/state.hpp"

#include "json_io.hpp"

#include <fstream>
#include <sstream>

namespace emm::json_io {

json to_json(Article const& a) {
  return {{"id", a.article_id}, {"source", a.source_id}, {"lang", a.language}, {"country", a.country},
          {"published", a.published_at}, {"title", a.title}, {"body", a.body}, {"url", a.url}};
}

Article article_from(json const& j) {
  Article a;
  a.article_id = j.at("id").get<std::string>();
  a.source_id = j.at("source").get<std::string>();
  a.language = j.at("lang").get<std::string>();
  a.country = j.at("country").get<std::string>();
  a.published_at = j.at("published").get<Timestamp>();
  a.title = j.at("title").get<std::string>();
  a.body = j.at("body").get<std::string>();
  a.url = j.at("url").get<std::string>();
  return a;
}

json to_json(cluster::Cluster const& c) {
  json hist = json::array();
  for (auto const& p : c.size_history) hist.push_back({p.at, p.size});
  return {{"id", c.cluster_id},          {"lang", c.language},         {"round", c.round},
          {"members", c.members},        {"attached", c.attached},     {"centroid", c.centroid},
          {"medoid", c.medoid_article_id}, {"title", c.title},         {"chain", c.chain_id},
          {"chain_started", c.chain_started}, {"fresh", c.fresh_chain}, {"history", hist}};
}

cluster::Cluster cluster_from(json const& j) {
  cluster::Cluster c;
  c.cluster_id = j.at("id").get<std::string>();
  c.language = j.at("lang").get<std::string>();
  c.round = j.at("round").get<Timestamp>();
  c.members = j.at("members").get<std::vector<std::string>>();
  c.attached = j.at("attached").get<std::vector<std::string>>();
  c.centroid = j.at("centroid").get<cluster::KeywordVector>();
  c.medoid_article_id = j.at("medoid").get<std::string>();
  c.title = j.at("title").get<std::string>();
  c.chain_id = j.at("chain").get<std::string>();
  c.chain_started = j.at("chain_started").get<Timestamp>();
  c.fresh_chain = j.at("fresh").get<bool>();
  for (auto const& p : j.at("history")) c.size_history.push_back({p.at(0).get<Timestamp>(), p.at(1).get<std::size_t>()});
  return c;
}

json to_json(names::Entity const& e) {
  return {{"id", e.entity_id},     {"type", names::to_string(e.type)}, {"primary", e.primary},
          {"latin", e.primary_latin}, {"canonical", e.canonical},      {"variants", e.variants},
          {"titles", e.titles},    {"clusters", e.cluster_refs}};
}

names::Entity entity_from(json const& j) {
  names::Entity e;
  e.entity_id = j.at("id").get<names::EntityId>();
  auto const type = names::parse_entity_type(j.at("type").get<std::string>());
  if (!type) throw Error("bad entity type");
  e.type = *type;
  e.primary = j.at("primary").get<std::string>();
  e.primary_latin = j.at("latin").get<std::string>();
  e.canonical = j.at("canonical").get<std::string>();
  e.variants = j.at("variants").get<std::set<std::string>>();
  e.titles = j.at("titles").get<std::map<std::string, int>>();
  e.cluster_refs = j.at("clusters").get<std::set<std::string>>();
  return e;
}

json to_json(quotes::QuoteRecord const& q) {
  json j{{"speaker", q.speaker}, {"verb", q.verb},   {"quote", q.quote_text}, {"article", q.article_id},
         {"begin", q.begin},     {"end", q.end},     {"quote_begin", q.quote_begin}, {"quote_end", q.quote_end}};
  j["entity"] = q.entity_id ? json(*q.entity_id) : json(nullptr);
  return j;
}

quotes::QuoteRecord quote_from(json const& j) {
  quotes::QuoteRecord q;
  if (!j.at("entity").is_null()) q.entity_id = j.at("entity").get<names::EntityId>();
  q.speaker = j.at("speaker").get<std::string>();
  q.verb = j.at("verb").get<std::string>();
  q.quote_text = j.at("quote").get<std::string>();
  q.article_id = j.at("article").get<std::string>();
  q.begin = j.at("begin").get<std::size_t>();
  q.end = j.at("end").get<std::size_t>();
  q.quote_begin = j.at("quote_begin").get<std::size_t>();
  q.quote_end = j.at("quote_end").get<std::size_t>();
  return q;
}

json to_json(alerts::Alert const& a) {
  return {{"at", a.at},         {"country", a.key.country}, {"category", a.key.category}, {"count", a.count},
          {"adjusted", a.adjusted}, {"mean", a.mean},       {"level", a.level},           {"bucket", a.bucket}};
}

alerts::Alert alert_from(json const& j) {
  alerts::Alert a;
  a.at = j.at("at").get<Timestamp>();
  a.key = {j.at("country").get<std::string>(), j.at("category").get<std::string>()};
  a.count = j.at("count").get<double>();
  a.adjusted = j.at("adjusted").get<double>();
  a.mean = j.at("mean").get<double>();
  a.level = j.at("level").get<double>();
  a.bucket = j.at("bucket").get<int>();
  return a;
}

json to_json(Day day, xlink::LinkEdge const& e) {
  return {{"date", format_date(day)}, {"cluster_a", e.cluster_a}, {"lang_a", e.language_a},
          {"cluster_b", e.cluster_b}, {"lang_b", e.language_b},   {"combined", e.combined},
          {"subject", e.parts.subject}, {"country", e.parts.country}, {"entity", e.parts.entity},
          {"keyword", e.parts.keyword}};
}

std::pair<Day, xlink::LinkEdge> link_from(json const& j) {
  auto const day = parse_date(j.at("date").get<std::string>());
  if (!day) throw Error("bad date");
  xlink::LinkEdge e;
  e.cluster_a = j.at("cluster_a").get<std::string>();
  e.language_a = j.at("lang_a").get<std::string>();
  e.cluster_b = j.at("cluster_b").get<std::string>();
  e.language_b = j.at("lang_b").get<std::string>();
  e.combined = j.at("combined").get<double>();
  e.parts = {j.at("subject").get<double>(), j.at("country").get<double>(), j.at("entity").get<double>(),
             j.at("keyword").get<double>()};
  return {*day, e};
}

json to_json(cluster::BreakingNewsFlag const& f) {
  return {{"cluster", f.cluster_id}, {"reason", cluster::to_string(f.reason)}, {"articles_30min", f.articles_30min},
          {"sources", f.distinct_sources}};
}

cluster::BreakingNewsFlag breaking_from(json const& j) {
  cluster::BreakingNewsFlag f;
  f.cluster_id = j.at("cluster").get<std::string>();
  auto const r = j.at("reason").get<std::string>();
  if (r == "new-large") {
    f.reason = cluster::BreakingReason::NewLarge;
  } else if (r == "rapid-rise") {
    f.reason = cluster::BreakingReason::RapidRise;
  } else {
    throw Error("bad breaking reason '" + r + "'");
  }
  f.articles_30min = j.at("articles_30min").get<std::size_t>();
  f.distinct_sources = j.at("sources").get<std::size_t>();
  return f;
}

json optional_json(std::optional<Timestamp> t) { return t ? json(*t) : json(nullptr); }

std::optional<Timestamp> optional_from(json const& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<Timestamp>();
}

}  // namespace emm::json_io

namespace emm {
namespace {

using namespace json_io;

constexpr int kVersion = 1;

// ------------------------------------------------------------ framing

class Writer {
 public:
  Writer(std::filesystem::path const& dir, std::string name) : name_(std::move(name)), out_(dir / (name_ + ".jsonl")) {
    if (!out_) throw Error("cannot write " + (dir / (name_ + ".jsonl")).string());
    out_ << json{{"emm_state", name_}, {"version", kVersion}}.dump() << '\n';
  }
  void write(json const& record) {
    out_ << record.dump() << '\n';
    ++count_;
  }
  void close() {
    out_ << json{{"end", name_}, {"records", count_}}.dump() << '\n';
    out_.close();
    if (!out_) throw Error("write failed for " + name_ + ".jsonl");
  }

 private:
  std::string name_;
  std::ofstream out_;
  std::size_t count_ = 0;
};

template <class F>
void read_records(std::filesystem::path const& dir, std::string const& name, F&& on_record) {
  auto const path = dir / (name + ".jsonl");
  auto const file = name + ".jsonl";
  std::ifstream in(path);
  if (!in) throw Error(file + ": missing");
  std::string line;
  std::size_t lineno = 0;
  std::size_t records = 0;
  bool ended = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto const where = file + ":" + std::to_string(lineno) + ": ";
    if (ended) throw Error(where + "data after the trailer");
    json j;
    try {
      j = json::parse(line);
    } catch (json::exception const& e) {
      throw Error(where + "not JSON (" + e.what() + ")");
    }
    if (lineno == 1) {
      if (!j.is_object() || j.value("emm_state", "") != name || j.value("version", 0) != kVersion) {
        throw Error(where + "bad header");
      }
      continue;
    }
    if (j.is_object() && j.size() == 2 && j.contains("end") && j.contains("records") && j["end"].is_string()) {
      if (j["end"] != name || j.value("records", std::size_t{0}) != records) {
        throw Error(where + "trailer does not match the records read");
      }
      ended = true;
      continue;
    }
    try {
      on_record(j);
    } catch (json::exception const& e) {
      throw Error(where + "bad record (" + e.what() + ")");
    } catch (Error const& e) {
      throw Error(where + e.what());
    }
    ++records;
  }
  if (lineno == 0) throw Error(file + ": empty");
  if (!ended) throw Error(file + ": truncated (no trailer)");
}

void write_text(std::filesystem::path const& path, std::string const& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

cluster::Cluster const* State::find_cluster(std::string const& cluster_id) const {
  for (auto const* slot : {&clusters, &previous}) {
    for (auto const& [lang, list] : *slot) {
      for (auto const& c : list) {
        if (c.cluster_id == cluster_id) return &c;
      }
    }
  }
  return nullptr;
}

bool operator==(State const& a, State const& b) {
  return a.articles.all() == b.articles.all() && a.annotations == b.annotations && a.clusters == b.clusters &&
         a.previous == b.previous && a.entities == b.entities && a.quotes == b.quotes && a.alerts == b.alerts &&
         a.alert_log == b.alert_log && a.profiles == b.profiles && a.links == b.links && a.breaking == b.breaking &&
         a.last_round == b.last_round && a.previous_round == b.previous_round;
}

std::string cluster_feed(State const& state, std::string const& language) {
  std::vector<RssItem> items;
  auto const it = state.clusters.find(language);
  if (it != state.clusters.end()) {
    for (auto const& c : it->second) {
      RssItem item;
      item.title = c.title;
      item.guid = c.cluster_id;
      if (auto const* medoid = state.articles.find(c.medoid_article_id)) item.link = medoid->url;
      Timestamp newest = 0;
      for (auto const& id : c.members) {
        if (auto const* a = state.articles.find(id)) newest = std::max(newest, a->published_at);
      }
      item.pub_date = newest;
      item.description = std::to_string(c.size()) + " articles; story " + c.chain_id;
      items.push_back(std::move(item));
    }
  }
  RssChannel channel;
  channel.title = "EMM clusters (" + language + ")";
  channel.language = language;
  channel.description = state.last_round ? "round " + format_iso8601(*state.last_round) : "no round yet";
  return emit_rss(std::move(items), channel);
}

void save_state(State const& s, std::filesystem::path const& dir) {
  namespace fs = std::filesystem;
  auto const parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  fs::create_directories(parent);
  auto const tmp = parent / (dir.filename().string() + ".tmp");
  auto const old = parent / (dir.filename().string() + ".old");
  fs::remove_all(tmp);
  fs::create_directories(tmp / "feeds");

  {
    Writer w(tmp, "meta");
    json meta{{"last_round", optional_json(s.last_round)}, {"previous_round", optional_json(s.previous_round)}};
    auto const first = s.alerts.first_day();
    meta["alert_first_day"] = first ? json(*first) : json(nullptr);
    w.write(meta);
    w.close();
  }
  {
    Writer w(tmp, "articles");
    for (auto const& [id, a] : s.articles.all()) w.write(to_json(a));
    w.close();
  }
  {
    Writer w(tmp, "annotations");
    for (auto const& [id, a] : s.annotations) {
      json j{{"id", id}, {"categories", a.categories}, {"countries", a.countries}, {"entities", a.entities}};
      j["major"] = a.major_location ? json(*a.major_location) : json(nullptr);
      w.write(j);
    }
    w.close();
  }
  {
    Writer w(tmp, "clusters");
    for (auto const& [slot, map] : {std::pair{"current", &s.clusters}, std::pair{"previous", &s.previous}}) {
      for (auto const& [lang, list] : *map) {
        for (auto const& c : list) {
          auto j = to_json(c);
          j["slot"] = slot;
          w.write(j);
        }
      }
    }
    w.close();
  }
  {
    Writer w(tmp, "entities");
    for (auto const& [id, e] : s.entities.all()) w.write(to_json(e));
    w.close();
  }
  {
    Writer w(tmp, "quotes");
    for (auto const& q : s.quotes) w.write(to_json(q));
    w.close();
  }
  {
    Writer w(tmp, "alert_counts");
    for (auto const& [key, hours] : s.alerts.hourly()) {
      for (auto const& [h, n] : hours) w.write({{"country", key.country}, {"category", key.category}, {"hour", h}, {"count", n}});
    }
    for (auto const& [id, at] : s.alerts.seen()) w.write({{"seen", id}, {"at", at}});
    for (auto const& [key, dr] : s.alerts.raised()) {
      w.write({{"raised_country", key.country}, {"raised_category", key.category}, {"day", dr.first}, {"bucket", dr.second}});
    }
    w.close();
  }
  {
    Writer w(tmp, "alerts");
    for (auto const& a : s.alert_log) w.write(to_json(a));
    w.close();
  }
  {
    Writer w(tmp, "links");
    for (auto const& [day, edges] : s.links) {
      for (auto const& e : edges) w.write(to_json(day, e));
    }
    w.close();
  }
  {
    Writer w(tmp, "breaking");
    for (auto const& f : s.breaking) w.write(to_json(f));
    w.close();
  }
  {
    std::ostringstream ss;
    s.profiles.save(ss);
    auto body = ss.str();
    std::size_t const rows = static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n'));
    write_text(tmp / "profiles.tsv", body + "#end\t" + std::to_string(rows) + "\n");
  }
  for (auto const& [lang, list] : s.clusters) write_text(tmp / "feeds" / (lang + ".rss"), cluster_feed(s, lang));

  fs::remove_all(old);
  if (fs::exists(dir)) fs::rename(dir, old);
  fs::rename(tmp, dir);
  fs::remove_all(old);
}

State load_state(std::filesystem::path const& dir) {
  namespace fs = std::filesystem;
  State s;
  if (!fs::exists(dir)) return s;
  if (!fs::is_directory(dir)) throw Error(dir.string() + " is not a directory");

  std::optional<Day> alert_first_day;
  read_records(dir, "meta", [&](json const& j) {
    s.last_round = optional_from(j.at("last_round"));
    s.previous_round = optional_from(j.at("previous_round"));
    if (!j.at("alert_first_day").is_null()) alert_first_day = j.at("alert_first_day").get<Day>();
  });
  read_records(dir, "articles", [&](json const& j) {
    if (!s.articles.insert(article_from(j))) throw Error("duplicate article");
  });
  read_records(dir, "annotations", [&](json const& j) {
    Annotation a;
    a.categories = j.at("categories").get<std::set<std::string>>();
    a.countries = j.at("countries").get<geo::CountryVector>();
    a.entities = j.at("entities").get<std::vector<names::EntityId>>();
    if (!j.at("major").is_null()) a.major_location = j.at("major").get<geo::LocationId>();
    s.annotations[j.at("id").get<std::string>()] = std::move(a);
  });
  read_records(dir, "clusters", [&](json const& j) {
    auto c = cluster_from(j);
    auto const slot = j.at("slot").get<std::string>();
    if (slot != "current" && slot != "previous") throw Error("bad cluster slot");
    auto& map = slot == "current" ? s.clusters : s.previous;
    map[c.language].push_back(std::move(c));
  });
  read_records(dir, "entities", [&](json const& j) { s.entities.insert(entity_from(j)); });
  read_records(dir, "quotes", [&](json const& j) { s.quotes.push_back(quote_from(j)); });

  std::map<alerts::AlertKey, std::map<Timestamp, int>> hourly;
  std::map<std::string, Timestamp> seen;
  std::map<alerts::AlertKey, std::pair<Day, int>> raised;
  read_records(dir, "alert_counts", [&](json const& j) {
    if (j.contains("seen")) {
      seen[j.at("seen").get<std::string>()] = j.at("at").get<Timestamp>();
    } else if (j.contains("raised_country")) {
      raised[{j.at("raised_country").get<std::string>(), j.at("raised_category").get<std::string>()}] = {
          j.at("day").get<Day>(), j.at("bucket").get<int>()};
    } else {
      int const n = j.at("count").get<int>();
      if (n <= 0) throw Error("non-positive count");
      hourly[{j.at("country").get<std::string>(), j.at("category").get<std::string>()}][j.at("hour").get<Timestamp>()] = n;
    }
  });
  s.alerts.restore(std::move(hourly), std::move(seen), std::move(raised), alert_first_day);
  read_records(dir, "alerts", [&](json const& j) { s.alert_log.push_back(alert_from(j)); });
  read_records(dir, "links", [&](json const& j) {
    auto [day, e] = link_from(j);
    s.links[day].push_back(std::move(e));
  });
  read_records(dir, "breaking", [&](json const& j) { s.breaking.push_back(breaking_from(j)); });

  std::ifstream in(dir / "profiles.tsv");
  if (!in) throw Error("profiles.tsv: missing");
  std::string body, line;
  std::size_t rows = 0;
  bool ended = false;
  while (std::getline(in, line)) {
    if (ended) throw Error("profiles.tsv: data after the trailer");
    if (line.rfind("#end\t", 0) == 0) {
      if (line.substr(5) != std::to_string(rows)) throw Error("profiles.tsv: trailer does not match the rows read");
      ended = true;
      continue;
    }
    body += line + "\n";
    ++rows;
  }
  if (!ended) throw Error("profiles.tsv: truncated (no trailer)");
  std::istringstream ps(body);
  s.profiles = subject::SubjectProfiles::load(ps, "profiles.tsv");
  return s;
}

}  // namespace emm
