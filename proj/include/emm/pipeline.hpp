#pragma once

#include "emm/catdsl.hpp"
#include "emm/config.hpp"
#include "emm/state.hpp"

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace emm {

// Data files named by the config, loaded once.
struct Resources {
  std::unique_ptr<catdsl::CategoryMatcher> categories;
  std::map<std::string, std::string> category_country;  // country categories only
  geo::Gazetteer gazetteer;
  geo::GeoStopList geostop;
  names::NameParams name_params;
  names::NameNormalizer normalizer;
  cluster::BackgroundModels models;
  std::set<subject::SubjectCode> subject_codes;

  static Resources load(Config const& config);
};

struct LanguageCounts {
  std::size_t window_articles = 0;
  std::size_t clusters = 0;

  friend bool operator==(LanguageCounts const&, LanguageCounts const&) = default;
};

struct RoundReport {
  Timestamp round = 0;
  std::size_t new_articles = 0;
  std::map<std::string, LanguageCounts> languages;
  std::vector<cluster::BreakingNewsFlag> breaking;
  std::vector<xlink::LinkEdge> links;
  std::size_t language_pairs = 0;
  std::vector<alerts::Alert> alerts;
  Diagnostics diagnostics;
  double seconds = 0.0;  // wall clock, informational only

  std::string to_json() const;
};

class Pipeline {
 public:
  Pipeline(Config config, Resources const& resources, State state = {});

  State const& state() const { return state_; }
  Config const& config() const { return config_; }
  Resources const& resources() const { return resources_; }

  // Reads every configured source and stores the items published at or
  // before `now`. Returns the number of new articles.
  std::size_t ingest(Timestamp now, Diagnostics* diagnostics = nullptr);
  // Stores items from an already parsed feed.
  std::size_t ingest_items(std::vector<RawItem> const& items, SourceDescriptor const& source, Timestamp now,
                           Diagnostics* diagnostics = nullptr);
  bool add_article(Article article);

  // Annotate new articles, cluster every language, chain, flag breaking
  // news, link across languages and evaluate alerts. Works on a copy of the
  // state that replaces the current one only when the round completes.
  // Running the same `now` again reproduces the same state.
  RoundReport run_round(Timestamp now);

  xlink::ClusterSignature signature(cluster::Cluster const& c) const;
  xlink::ClusterSignature signature(State const& state, cluster::Cluster const& c) const;

 private:
  cluster::KeywordVector const& vector_of(Article const& a) const;
  void annotate(State& s, Article const& a, Diagnostics& diags) const;

  Config config_;
  Resources const& resources_;
  State state_;
  mutable std::unordered_map<std::string, cluster::KeywordVector> vectors_;
};

// Entity ids of each current cluster, for co-occurrence counts.
std::vector<std::set<names::EntityId>> cluster_entities(State const& state);

xlink::EntityProfile entity_profile(State const& state, names::EntityId id);

}  // namespace emm
