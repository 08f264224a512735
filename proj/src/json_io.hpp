#pragma once

// JSON converters shared by the state files and the HTTP API.

#include "emm/state.hpp"

#include <json.hpp>

namespace emm::json_io {

using nlohmann::json;

json to_json(Article const& a);
Article article_from(json const& j);
json to_json(cluster::Cluster const& c);
cluster::Cluster cluster_from(json const& j);
json to_json(names::Entity const& e);
names::Entity entity_from(json const& j);
json to_json(quotes::QuoteRecord const& q);
quotes::QuoteRecord quote_from(json const& j);
json to_json(alerts::Alert const& a);
alerts::Alert alert_from(json const& j);
json to_json(Day day, xlink::LinkEdge const& e);
std::pair<Day, xlink::LinkEdge> link_from(json const& j);
json to_json(cluster::BreakingNewsFlag const& f);
cluster::BreakingNewsFlag breaking_from(json const& j);
json optional_json(std::optional<Timestamp> t);
std::optional<Timestamp> optional_from(json const& j);

}  // namespace emm::json_io
