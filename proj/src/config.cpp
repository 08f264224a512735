#include "emm/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace emm {
namespace {

using nlohmann::json;

std::filesystem::path resolve(std::filesystem::path const& base, std::string const& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || p.empty() ? path : base / path;
}

template <class T>
T get(json const& j, char const* key) {
  try {
    return j.at(key).get<T>();
  } catch (json::exception const&) {
    throw Error(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

Config Config::defaults(std::filesystem::path const& data_dir) {
  Config c;
  c.data_dir = data_dir;
  c.training = data_dir / "subjects" / "train";
  return c;
}

Config Config::parse(std::string_view text, std::filesystem::path const& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (json::parse_error const& e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config must be a JSON object");
  static std::set<std::string> const known{"data_dir", "sources", "training", "theta",  "tau_link", "tau_name",
                                           "rho",      "c_min",   "S_min",    "D_min",  "R",        "K",
                                           "M",        "window",  "W_min",    "cadence", "subjects", "weekday_normalization",
                                           "link_weights", "quote_marks"};
  for (auto const& [key, value] : j.items()) {
    if (!known.count(key)) throw Error("unknown config key '" + key + "'");
  }
  if (!j.contains("data_dir")) throw Error("config key 'data_dir' is required");
  Config c = defaults(resolve(base, get<std::string>(j, "data_dir")));
  if (j.contains("sources")) c.sources = resolve(base, get<std::string>(j, "sources"));
  if (j.contains("training")) c.training = resolve(base, get<std::string>(j, "training"));
  if (j.contains("theta")) c.theta = get<double>(j, "theta");
  if (j.contains("tau_link")) c.tau_link = get<double>(j, "tau_link");
  if (j.contains("tau_name")) c.tau_name = get<double>(j, "tau_name");
  if (j.contains("rho")) c.rho = get<double>(j, "rho");
  if (j.contains("c_min")) c.c_min = get<double>(j, "c_min");
  if (j.contains("S_min")) c.s_min = get<std::size_t>(j, "S_min");
  if (j.contains("D_min")) c.d_min = get<std::size_t>(j, "D_min");
  if (j.contains("R")) c.rise = get<double>(j, "R");
  if (j.contains("K")) c.k = get<std::size_t>(j, "K");
  if (j.contains("M")) c.m = get<std::size_t>(j, "M");
  if (j.contains("window")) c.window = get<Timestamp>(j, "window");
  if (j.contains("W_min")) c.min_articles = get<std::size_t>(j, "W_min");
  if (j.contains("cadence")) c.cadence = get<Timestamp>(j, "cadence");
  if (j.contains("subjects")) c.subjects_enabled = get<bool>(j, "subjects");
  if (j.contains("weekday_normalization")) c.weekday_normalization = get<bool>(j, "weekday_normalization");
  if (j.contains("link_weights")) {
    auto const w = get<std::vector<double>>(j, "link_weights");
    if (w.size() != 4) throw Error("config key 'link_weights' needs four numbers");
    c.weights = {w[0], w[1], w[2], w[3]};
  }
  if (j.contains("quote_marks")) {
    c.quote_marks.clear();
    for (auto const& pair : get<std::vector<std::vector<std::string>>>(j, "quote_marks")) {
      if (pair.size() != 2) throw Error("config key 'quote_marks' needs [open, close] pairs");
      c.quote_marks.push_back({pair[0], pair[1]});
    }
  }
  c.validate();
  return c;
}

Config Config::load(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str(), path.parent_path());
  } catch (Error const& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void Config::validate() const {
  auto unit = [](double v, char const* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(std::string("config key '") + name + "' must lie in [0, 1]");
  };
  unit(theta, "theta");
  unit(tau_link, "tau_link");
  unit(tau_name, "tau_name");
  if (!(rho > 0.0)) throw Error("config key 'rho' must be positive");
  if (!(c_min >= 0.0)) throw Error("config key 'c_min' must be non-negative");
  if (!(rise > 0.0)) throw Error("config key 'R' must be positive");
  if (k == 0) throw Error("config key 'K' must be at least 1");
  if (m == 0) throw Error("config key 'M' must be at least 1");
  if (window <= 0) throw Error("config key 'window' must be positive");
  if (cadence <= 0) throw Error("config key 'cadence' must be positive");
  for (double w : {weights.subject, weights.country, weights.entity, weights.keyword}) {
    if (!(w >= 0.0)) throw Error("config key 'link_weights' must be non-negative");
  }
  for (auto const& q : quote_marks) {
    if (q.open.empty() || q.close.empty()) throw Error("config key 'quote_marks' has an empty mark");
  }
  if (data_dir.empty()) throw Error("config key 'data_dir' is required");
}

std::string Config::to_json() const {
  json j;
  j["data_dir"] = data_dir.string();
  j["sources"] = sources.string();
  j["training"] = training.string();
  j["theta"] = theta;
  j["tau_link"] = tau_link;
  j["tau_name"] = tau_name;
  j["rho"] = rho;
  j["c_min"] = c_min;
  j["S_min"] = s_min;
  j["D_min"] = d_min;
  j["R"] = rise;
  j["K"] = k;
  j["M"] = m;
  j["window"] = window;
  j["W_min"] = min_articles;
  j["cadence"] = cadence;
  j["subjects"] = subjects_enabled;
  j["weekday_normalization"] = weekday_normalization;
  j["link_weights"] = {weights.subject, weights.country, weights.entity, weights.keyword};
  json marks = json::array();
  for (auto const& q : quote_marks) marks.push_back({q.open, q.close});
  j["quote_marks"] = marks;
  return j.dump(2);
}

}  // namespace emm
