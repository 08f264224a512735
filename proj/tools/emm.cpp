// Command-line front end: polling, rounds, read views and the HTTP server.

#include "emm/api.hpp"
#include "emm/pipeline.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <ctime>
#include <iostream>
#include <thread>

using namespace emm;

namespace {

constexpr int kExitError = 1;
constexpr int kExitNotFound = 3;

struct Globals {
  std::string state_dir = "state";
  std::string config;
  std::string clock;
};

Config load_config(Globals const& g) {
  return g.config.empty() ? Config::defaults(EMM_DATA_DIR) : Config::load(g.config);
}

Timestamp clock_of(Globals const& g) {
  if (g.clock.empty()) return static_cast<Timestamp>(std::time(nullptr));
  auto const t = parse_timestamp(g.clock);
  if (!t) throw Error("--clock: cannot parse '" + g.clock + "'");
  return *t;
}

void print_diagnostics(Diagnostics const& diags) {
  for (auto const& d : diags) std::cerr << "warning: " << d.where << ": " << d.message << "\n";
}

int print_response(ApiResponse const& r) {
  if (r.status == 200) {
    std::cout << r.body;
    return 0;
  }
  std::cerr << r.body;
  return r.status == 404 ? kExitNotFound : kExitError;
}

int cmd_ingest(Globals const& g) {
  auto const config = load_config(g);
  auto const resources = Resources::load(config);
  Pipeline p(config, resources, load_state(g.state_dir));
  Diagnostics diags;
  auto const n = p.ingest(clock_of(g), &diags);
  print_diagnostics(diags);
  save_state(p.state(), g.state_dir);
  std::cout << n << " new articles\n";
  return 0;
}

int cmd_round(Globals const& g, bool poll) {
  auto const config = load_config(g);
  auto const resources = Resources::load(config);
  Pipeline p(config, resources, load_state(g.state_dir));
  auto const now = clock_of(g);
  Diagnostics diags;
  if (poll) p.ingest(now, &diags);
  auto const report = p.run_round(now);
  print_diagnostics(diags);
  print_diagnostics(report.diagnostics);
  save_state(p.state(), g.state_dir);
  std::cout << report.to_json() << "\n";
  return 0;
}

int cmd_backfill(Globals const& g, std::string const& from_text) {
  auto const config = load_config(g);
  auto const resources = Resources::load(config);
  auto const from = parse_timestamp(from_text);
  if (!from) throw Error("--from: cannot parse '" + from_text + "'");
  auto const to = clock_of(g);
  if (*from > to) throw Error("--from lies after --clock");
  Pipeline p(config, resources, load_state(g.state_dir));
  std::size_t rounds = 0, links = 0;
  for (Timestamp t = *from; t <= to; t += config.cadence) {
    Diagnostics diags;
    p.ingest(t, &diags);
    auto const report = p.run_round(t);
    print_diagnostics(diags);
    ++rounds;
    links += report.links.size();
  }
  save_state(p.state(), g.state_dir);
  std::cout << rounds << " rounds, " << links << " link edges\n";
  return 0;
}

int cmd_serve(Globals const& g, std::string const& host, int port, int reload_seconds) {
  Api api(load_state(g.state_dir));
  ApiServer server(api);
  int const bound = server.bind(host, port);
  std::cerr << "serving " << g.state_dir << " on http://" << host << ":" << bound << "/api/status\n";

  static std::atomic<bool> stop{false};
  std::signal(SIGINT, [](int) { stop = true; });
  std::signal(SIGTERM, [](int) { stop = true; });

  std::thread http([&] { server.listen(); });
  auto const meta = std::filesystem::path(g.state_dir) / "meta.jsonl";
  std::error_code ec;
  auto stamp = std::filesystem::last_write_time(meta, ec);
  auto next_check = std::chrono::steady_clock::now();
  while (!stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    if (reload_seconds <= 0 || std::chrono::steady_clock::now() < next_check) continue;
    next_check = std::chrono::steady_clock::now() + std::chrono::seconds(reload_seconds);
    auto const now_stamp = std::filesystem::last_write_time(meta, ec);
    if (ec || now_stamp == stamp) continue;
    try {
      api.replace(load_state(g.state_dir));
      stamp = now_stamp;
      std::cerr << "reloaded state\n";
    } catch (Error const& e) {
      std::cerr << "warning: reload failed: " << e.what() << "\n";
    }
  }
  server.stop();
  http.join();
  return 0;
}

int cmd_validate(Globals const& g) {
  auto const config = load_config(g);
  Resources::load(config);
  if (!config.sources.empty()) load_sources(config.sources);
  std::cout << config.to_json() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilingual news monitoring: clustering, tagging, cross-language links and alerts"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--state-dir", g.state_dir, "State directory")->capture_default_str();
  app.add_option("--config", g.config, "Config file (JSON); default uses the built-in data directory");
  app.add_option("--clock", g.clock, "Logical time (ISO 8601, RFC 822 or epoch seconds); default now");

  auto* ingest = app.add_subcommand("ingest", "Poll every source and store new items");
  auto* round = app.add_subcommand("round", "Run one round at the clock time");
  bool poll = false;
  round->add_flag("--ingest", poll, "Poll sources before the round");
  auto* backfill = app.add_subcommand("backfill", "Poll and run rounds every cadence from --from to the clock time");
  std::string from;
  backfill->add_option("--from", from, "First round time")->required();
  auto* link = app.add_subcommand("link", "Print the cross-language link edges of a day");
  std::string date;
  link->add_option("--date", date, "YYYY-MM-DD; default the day of the last round");
  auto* alerts = app.add_subcommand("alerts", "Print alerts raised in the 24 hours before the last round");
  auto* entity = app.add_subcommand("entity", "Print the fused profile of an entity");
  std::string entity_id;
  entity->add_option("id", entity_id, "Entity id")->required();
  auto* serve = app.add_subcommand("serve", "Serve the read-only HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  int reload = 5;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--reload", reload, "Seconds between state reload checks; 0 disables")->capture_default_str();
  auto* validate = app.add_subcommand("validate-config", "Check the config and the data files it names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(g);
    if (*round) return cmd_round(g, poll);
    if (*backfill) return cmd_backfill(g, from);
    if (*serve) return cmd_serve(g, host, port, reload);
    if (*validate) return cmd_validate(g);

    Api const api(load_state(g.state_dir));
    if (*alerts) return print_response(api.handle("/api/alerts"));
    if (*entity) return print_response(api.handle("/api/entity/" + entity_id));
    if (*link) {
      if (date.empty()) {
        auto const s = api.snapshot();
        if (!s->last_round) throw Error("no round has run yet; pass --date");
        date = format_date(day_of(*s->last_round));
      }
      return print_response(api.handle("/api/links/" + date));
    }
  } catch (Error const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
