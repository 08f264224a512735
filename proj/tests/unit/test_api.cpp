#include <doctest.h>

#include "emm/api.hpp"
#include "emm/pipeline.hpp"

#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace emm;
using nlohmann::json;

namespace {

State const& fixture_state() {
  static State const s = [] {
    auto const dir = std::filesystem::path(EMM_DATA_DIR) / "fixtures" / "bilingual";
    auto const config = Config::load(dir / "config.json");
    static Resources const r = Resources::load(config);
    Pipeline p(config, r);
    auto const now = *parse_timestamp("2024-03-12T09:00:00Z");
    p.ingest(now);
    p.run_round(now);
    return p.state();
  }();
  return s;
}

json body(ApiResponse const& r) { return json::parse(r.body); }

}  // namespace

TEST_CASE("api clusters") {
  Api const api(fixture_state());
  auto const rss = api.handle("/api/clusters/en.rss");
  CHECK(rss.status == 200);
  CHECK(rss.content_type.find("rss") != std::string::npos);
  CHECK(rss.body == cluster_feed(fixture_state(), "en"));

  auto const js = api.handle("/api/clusters/fr.json");
  REQUIRE(js.status == 200);
  auto const j = body(js);
  CHECK(j["clusters"].size() == fixture_state().clusters.at("fr").size());
  CHECK(j["clusters"][0]["id"] == fixture_state().clusters.at("fr").front().cluster_id);

  CHECK(api.handle("/api/clusters/xx.json").status == 404);
  CHECK(api.handle("/api/clusters/en.txt").status == 404);
}

TEST_CASE("api cluster, story and links") {
  Api const api(fixture_state());
  auto const& top = fixture_state().clusters.at("en").front();
  auto const c = api.handle("/api/cluster/" + top.cluster_id);
  REQUIRE(c.status == 200);
  auto const j = body(c);
  CHECK(j["members"].size() == top.members.size());
  CHECK(j["links"].size() >= 1);

  auto const st = api.handle("/api/story/" + top.chain_id);
  REQUIRE(st.status == 200);
  CHECK(body(st)["clusters"][0]["id"] == top.cluster_id);

  auto const l = api.handle("/api/links/2024-03-12");
  REQUIRE(l.status == 200);
  auto const& day_links = fixture_state().links.begin()->second;
  CHECK(body(l)["edges"].size() == day_links.size());

  CHECK(api.handle("/api/cluster/nope").status == 404);
  CHECK(api.handle("/api/story/nope").status == 404);
  CHECK(api.handle("/api/links/2024-03-11").status == 404);
  CHECK(api.handle("/api/links/yesterday").status == 400);
  CHECK(api.handle("/nothing").status == 404);
}

TEST_CASE("api entity and alerts") {
  Api const api(fixture_state());
  auto const& [id, e] = *fixture_state().entities.all().begin();
  auto const r = api.handle("/api/entity/" + std::to_string(id));
  REQUIRE(r.status == 200);
  auto const j = body(r);
  CHECK(j["entity"]["primary"] == e.primary);
  CHECK(!j["clusters"].empty());
  CHECK(api.handle("/api/entity/99999").status == 404);
  CHECK(api.handle("/api/entity/abc").status == 404);

  auto const a = api.handle("/api/alerts");
  REQUIRE(a.status == 200);
  CHECK(body(a)["alerts"].is_array());
  CHECK(body(api.handle("/api/status"))["articles"] == 40);
}

TEST_CASE("api snapshot replacement") {
  Api api(State{});
  CHECK(api.handle("/api/clusters/en.rss").status == 404);
  auto const before = api.snapshot();
  api.replace(fixture_state());
  CHECK(api.handle("/api/clusters/en.rss").status == 200);
  CHECK(before->clusters.empty());
}

TEST_CASE("api over http") {
  Api const api(fixture_state());
  ApiServer server(api);
  int const port = server.bind("127.0.0.1", 0);
  std::thread t([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/clusters/en.rss");
  for (int i = 0; !res && i < 50; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    res = client.Get("/api/clusters/en.rss");
  }
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == cluster_feed(fixture_state(), "en"));
  auto const missing = client.Get("/api/cluster/none");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  server.stop();
  t.join();
}
