#pragma once

#include "emm/cluster.hpp"
#include "emm/error.hpp"
#include "emm/geotag.hpp"
#include "emm/names.hpp"
#include "emm/quotes.hpp"
#include "emm/subject.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace emm::xlink {

struct ClusterSignature {
  subject::SubjectVector subject;
  geo::CountryVector country;
  names::EntityVector entity;
  cluster::KeywordVector keyword;

  friend bool operator==(ClusterSignature const&, ClusterSignature const&) = default;
};

struct LinkWeights {
  double subject = 0.4;
  double country = 0.3;
  double entity = 0.2;
  double keyword = 0.1;
};

struct LinkParts {
  double subject = 0.0;
  double country = 0.0;
  double entity = 0.0;
  double keyword = 0.0;

  friend bool operator==(LinkParts const&, LinkParts const&) = default;
};

double combine(LinkParts const& parts, LinkWeights const& weights = {});

struct LinkScore {
  LinkParts parts;
  double combined = 0.0;
};

// Cosines of the four ingredients and their weighted sum. Symmetric.
LinkScore link_score(ClusterSignature const& a, ClusterSignature const& b, LinkWeights const& weights = {});

struct LinkEdge {
  std::string cluster_a;
  std::string language_a;
  std::string cluster_b;
  std::string language_b;
  double combined = 0.0;
  LinkParts parts;

  friend bool operator==(LinkEdge const&, LinkEdge const&) = default;
};

struct SignedCluster {
  std::string cluster_id;
  ClusterSignature signature;
};

using ClustersByLanguage = std::map<std::string, std::vector<SignedCluster>>;

struct LinkResult {
  std::vector<LinkEdge> edges;  // language_a < language_b; sorted by language pair, cluster_a, cluster_b
  std::size_t language_pairs = 0;
};

std::size_t language_pair_count(std::size_t languages);

// Scores every cross-language cluster pair and keeps those with
// combined >= tau. Languages without clusters still count as languages.
LinkResult link_clusters(ClustersByLanguage const& clusters, double tau = 0.5, LinkWeights const& weights = {});

// Best edge per cluster, by combined score then the other cluster's id.
std::map<std::string, LinkEdge> best_edges(std::span<LinkEdge const> edges);

struct EntityProfile {
  names::Entity entity;
  std::map<std::string, std::set<std::string>> clusters_by_language;
  std::vector<quotes::QuoteRecord> quotes;
  std::vector<std::pair<names::EntityId, double>> cooccurring;  // weighted count descending, then id
};

// Everything known about one entity across languages. `cluster_language`
// maps cluster ids to their language; refs to unknown clusters are grouped
// under "". Throws NotFound for an unknown id.
EntityProfile fuse_entity_profile(names::EntityId id, names::EntityStore const& store,
                                  std::map<std::string, std::string> const& cluster_language,
                                  std::span<quotes::QuoteRecord const> quotes,
                                  std::map<std::pair<names::EntityId, names::EntityId>, names::Cooccurrence> const& cooccurrence,
                                  std::size_t top = 10);

}  // namespace emm::xlink
