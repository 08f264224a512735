#pragma once

#include "emm/alerts.hpp"
#include "emm/cluster.hpp"
#include "emm/geotag.hpp"
#include "emm/ingest.hpp"
#include "emm/names.hpp"
#include "emm/quotes.hpp"
#include "emm/subject.hpp"
#include "emm/xlink.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace emm {

// What the taggers found in one article. Computed once, when the article
// first enters a round.
struct Annotation {
  std::set<std::string> categories;
  geo::CountryVector countries;
  std::optional<geo::LocationId> major_location;
  std::vector<names::EntityId> entities;  // one per merged mention, in text order

  friend bool operator==(Annotation const&, Annotation const&) = default;
};

struct State {
  ArticleStore articles;
  std::map<std::string, Annotation> annotations;
  std::map<std::string, std::vector<cluster::Cluster>> clusters;  // latest round, per language
  std::map<std::string, std::vector<cluster::Cluster>> previous;  // the round before it
  names::EntityStore entities;
  std::vector<quotes::QuoteRecord> quotes;
  alerts::AlertStore alerts;
  std::vector<alerts::Alert> alert_log;
  subject::SubjectProfiles profiles;
  std::map<Day, std::vector<xlink::LinkEdge>> links;  // latest round of each day
  std::vector<cluster::BreakingNewsFlag> breaking;    // latest round
  std::optional<Timestamp> last_round;
  std::optional<Timestamp> previous_round;

  State() = default;
  State(State const&) = default;
  State& operator=(State const&) = default;

  cluster::Cluster const* find_cluster(std::string const& cluster_id) const;
};

bool operator==(State const& a, State const& b);

// Line-delimited JSON files under `dir`, each framed by a header and a
// trailer line, plus profiles.tsv and the per-language cluster feeds. The
// directory is replaced as a whole. Layout in docs/state.md.
void save_state(State const& state, std::filesystem::path const& dir);

// Throws Error naming the file and line of the first bad record. A missing
// directory yields an empty state.
State load_state(std::filesystem::path const& dir);

// RSS document of a language's latest clusters, largest first.
std::string cluster_feed(State const& state, std::string const& language);

}  // namespace emm
