#include "emm/api.hpp"

#include "emm/pipeline.hpp"
#include "json_io.hpp"

#include <httplib.h>

#include <charconv>

namespace emm {
namespace {

using json_io::json;

constexpr char const* kJson = "application/json; charset=utf-8";
constexpr char const* kRss = "application/rss+xml; charset=utf-8";

ApiResponse ok(json const& j) { return {200, kJson, j.dump(2) + "\n"}; }

ApiResponse error(int status, std::string const& message) {
  return {status, kJson, json{{"error", message}}.dump() + "\n"};
}

ApiResponse not_found(std::string const& what) { return error(404, what + " not found"); }

bool consume(std::string_view& path, std::string_view prefix) {
  if (path.substr(0, prefix.size()) != prefix) return false;
  path.remove_prefix(prefix.size());
  return true;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

json breaking_of(State const& s, std::string const& cluster_id) {
  for (auto const& f : s.breaking) {
    if (f.cluster_id == cluster_id) return json_io::to_json(f);
  }
  return nullptr;
}

json summary(State const& s, cluster::Cluster const& c) {
  json j{{"id", c.cluster_id},   {"lang", c.language}, {"story", c.chain_id},
         {"title", c.title},     {"size", c.size()},   {"medoid", c.medoid_article_id},
         {"round", format_iso8601(c.round)}, {"story_started", format_iso8601(c.chain_started)}};
  if (auto const* a = s.articles.find(c.medoid_article_id)) j["url"] = a->url;
  j["breaking"] = breaking_of(s, c.cluster_id);
  return j;
}

json article_brief(State const& s, std::string const& id) {
  auto const* a = s.articles.find(id);
  if (!a) return {{"id", id}};
  return {{"id", id}, {"title", a->title}, {"url", a->url}, {"source", a->source_id},
          {"published", format_iso8601(a->published_at)}};
}

json edges_json(Day day, std::vector<xlink::LinkEdge> const& edges) {
  json out = json::array();
  for (auto const& e : edges) out.push_back(json_io::to_json(day, e));
  return out;
}

ApiResponse clusters(State const& s, std::string_view rest) {
  bool const rss = ends_with(rest, ".rss");
  if (!rss && !ends_with(rest, ".json")) return not_found("path");
  std::string const lang(rest.substr(0, rest.rfind('.')));
  auto const it = s.clusters.find(lang);
  if (it == s.clusters.end()) return not_found("language '" + lang + "'");
  if (rss) return {200, kRss, cluster_feed(s, lang)};
  json list = json::array();
  for (auto const& c : it->second) list.push_back(summary(s, c));
  return ok({{"lang", lang}, {"round", s.last_round ? json(format_iso8601(*s.last_round)) : json(nullptr)},
             {"clusters", list}});
}

ApiResponse one_cluster(State const& s, std::string const& id) {
  auto const* c = s.find_cluster(id);
  if (!c) return not_found("cluster '" + id + "'");
  auto j = summary(s, *c);
  j["members"] = json::array();
  for (auto const& m : c->members) j["members"].push_back(article_brief(s, m));
  j["attached"] = json::array();
  for (auto const& m : c->attached) j["attached"].push_back(article_brief(s, m));
  j["links"] = json::array();
  if (s.last_round) {
    auto const day = day_of(*s.last_round);
    if (auto const it = s.links.find(day); it != s.links.end()) {
      for (auto const& e : it->second) {
        if (e.cluster_a == id || e.cluster_b == id) j["links"].push_back(json_io::to_json(day, e));
      }
    }
  }
  return ok(j);
}

ApiResponse story(State const& s, std::string const& chain) {
  json rounds = json::array();
  for (auto const* slot : {&s.clusters, &s.previous}) {
    for (auto const& [lang, cs] : *slot) {
      for (auto const& c : cs) {
        if (c.chain_id != chain) continue;
        json hist = json::array();
        for (auto const& p : c.size_history) hist.push_back({{"at", format_iso8601(p.at)}, {"size", p.size}});
        auto j = summary(s, c);
        j["size_history"] = hist;
        rounds.push_back(j);
      }
    }
  }
  if (rounds.empty()) return not_found("story '" + chain + "'");
  return ok({{"story", chain}, {"clusters", rounds}});
}

ApiResponse entity(State const& s, std::string_view id_text) {
  names::EntityId id = 0;
  auto const [end, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
  if (ec != std::errc{} || end != id_text.data() + id_text.size()) return not_found("entity '" + std::string(id_text) + "'");
  xlink::EntityProfile p;
  try {
    p = entity_profile(s, id);
  } catch (NotFound const&) {
    return not_found("entity " + std::string(id_text));
  }
  json quotes = json::array();
  for (auto const& q : p.quotes) quotes.push_back(json_io::to_json(q));
  json co = json::array();
  for (auto const& [other, w] : p.cooccurring) {
    auto const* e = s.entities.find(other);
    co.push_back({{"id", other}, {"name", e ? e->primary : ""}, {"weight", w}});
  }
  return ok({{"entity", json_io::to_json(p.entity)}, {"clusters", p.clusters_by_language}, {"quotes", quotes},
             {"cooccurring", co}});
}

ApiResponse alerts_view(State const& s) {
  json list = json::array();
  if (s.last_round) {
    for (auto const& a : s.alert_log) {
      if (a.at > *s.last_round - kDay) list.push_back(json_io::to_json(a));
    }
  }
  return ok({{"round", s.last_round ? json(format_iso8601(*s.last_round)) : json(nullptr)}, {"alerts", list}});
}

ApiResponse links(State const& s, std::string_view date) {
  auto const day = parse_date(date);
  if (!day) return error(400, "expected a date YYYY-MM-DD");
  auto const it = s.links.find(*day);
  if (it == s.links.end()) return not_found("links for " + std::string(date));
  return ok({{"date", format_date(*day)}, {"edges", edges_json(*day, it->second)}});
}

ApiResponse status(State const& s) {
  json langs = json::object();
  for (auto const& [lang, cs] : s.clusters) langs[lang] = cs.size();
  return ok({{"last_round", s.last_round ? json(format_iso8601(*s.last_round)) : json(nullptr)},
             {"articles", s.articles.size()},
             {"entities", s.entities.size()},
             {"clusters", langs}});
}

}  // namespace

Api::Api(State state) : state_(std::make_shared<State const>(std::move(state))) {}

void Api::replace(State state) {
  auto next = std::make_shared<State const>(std::move(state));
  std::lock_guard lock(mutex_);
  state_ = std::move(next);
}

std::shared_ptr<State const> Api::snapshot() const {
  std::lock_guard lock(mutex_);
  return state_;
}

ApiResponse Api::handle(std::string_view path) const {
  auto const snap = snapshot();
  auto const& s = *snap;
  if (auto const q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  if (path == "/api/status") return status(s);
  if (path == "/api/alerts") return alerts_view(s);
  if (consume(path, "/api/clusters/")) return clusters(s, path);
  if (consume(path, "/api/cluster/")) return one_cluster(s, std::string(path));
  if (consume(path, "/api/story/")) return story(s, std::string(path));
  if (consume(path, "/api/entity/")) return entity(s, path);
  if (consume(path, "/api/links/")) return links(s, path);
  return not_found("path");
}

struct ApiServer::Impl {
  httplib::Server server;
};

ApiServer::ApiServer(Api const& api) : impl_(std::make_unique<Impl>()) {
  impl_->server.Get(".*", [&api](httplib::Request const& req, httplib::Response& res) {
    auto const r = api.handle(req.path);
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
  });
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(std::string const& host, int port) {
  int const bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void ApiServer::listen() { impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace emm
