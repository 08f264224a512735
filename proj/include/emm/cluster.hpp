#pragma once

#include "emm/error.hpp"
#include "emm/ingest.hpp"
#include "emm/llr.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace emm::cluster {

// Sparse token -> weight map. No entry is stored with weight below
// kWeightEpsilon.
using KeywordVector = std::map<std::string, double>;

// Lowercased tokens of title and body that contain at least one letter.
std::vector<std::string> content_tokens(std::string_view title, std::string_view body);
std::vector<std::string> content_tokens(Article const& article);

KeywordVector term_frequency(std::span<std::string const> tokens);

// Keyword weights of the article against a background model. Without a
// usable background the raw term frequencies are returned and a diagnostic
// is added.
KeywordVector vectorize(Article const& article, FrequencyModel const* background, Diagnostics* diagnostics = nullptr);

// Background models by language, loaded from `<dir>/<lang>.tsv`.
class BackgroundModels {
 public:
  static BackgroundModels load(std::filesystem::path const& dir);
  FrequencyModel const* find(std::string const& language) const;
  void add(std::string language, FrequencyModel model) { models_[std::move(language)] = std::move(model); }

 private:
  std::map<std::string, FrequencyModel> models_;
};

// Group-average agglomerative clustering of the vectors (each scaled to unit
// length first). Merges the most similar pair while its similarity is >= theta.
// Comparisons use a 1e-12 tolerance; near-ties go to the pair whose smallest
// member indices are lexicographically smallest. Groups list member indices ascending and are
// ordered by size descending, then by smallest member.
std::vector<std::vector<std::size_t>> agglomerate(std::span<KeywordVector const> vectors, double theta);

KeywordVector unit(KeywordVector v);

struct SizePoint {
  Timestamp at = 0;
  std::size_t size = 0;

  friend bool operator==(SizePoint const&, SizePoint const&) = default;
};

struct Cluster {
  std::string cluster_id;
  std::string language;
  Timestamp round = 0;
  std::vector<std::string> members;   // in-window article ids, sorted
  std::vector<std::string> attached;  // out-of-window ids inherited from the chain, sorted
  KeywordVector centroid;             // unit length
  std::string medoid_article_id;
  std::string title;                  // medoid title
  std::string chain_id;
  Timestamp chain_started = 0;
  bool fresh_chain = true;
  std::vector<SizePoint> size_history;  // ascending

  std::size_t size() const { return members.size() + attached.size(); }

  friend bool operator==(Cluster const&, Cluster const&) = default;
};

// Window articles of one language with their keyword vectors (parallel
// spans). Clusters are sorted by size descending; the largest is the top story.
std::vector<Cluster> cluster_window(std::span<Article const* const> articles, std::span<KeywordVector const> vectors,
                                    double theta, Timestamp round);

// Articles of one language published in (now - window, now], extended back in
// time until it holds at least `min_articles` (when that many exist).
std::vector<Article const*> select_window(std::span<Article const* const> articles, Timestamp now, Timestamp window,
                                          std::size_t min_articles);

struct ChainParams {
  double min_overlap = 0.10;  // |C ∩ P| / |C|
};

// Links every current cluster to the best qualifying previous cluster or
// starts a fresh chain, and appends the round's size to size_history.
// `in_window` holds the ids of this round's window articles; members of a
// linked predecessor outside it are attached to the current cluster with the
// largest overlap with that predecessor.
void chain_clusters(std::vector<Cluster>& current, std::span<Cluster const> previous,
                    std::set<std::string> const& in_window, ChainParams const& params = {});

enum class BreakingReason { NewLarge, RapidRise };

std::string to_string(BreakingReason reason);

struct BreakingNewsFlag {
  std::string cluster_id;
  BreakingReason reason = BreakingReason::NewLarge;
  std::size_t articles_30min = 0;
  std::size_t distinct_sources = 0;

  friend bool operator==(BreakingNewsFlag const&, BreakingNewsFlag const&) = default;
};

struct BreakingParams {
  std::size_t min_size = 10;     // S_min
  std::size_t min_sources = 5;   // D_min
  double rise_factor = 4.0;      // R
  Timestamp recent = 30 * kMinute;
  Timestamp baseline = 4 * kHour;
  double baseline_floor = 1.0;   // per recent period
};

// Cluster size at time t according to its history (0 before the first point).
std::size_t size_at(std::span<SizePoint const> history, Timestamp t);

std::optional<BreakingNewsFlag> detect_breaking(Cluster const& cluster, std::size_t distinct_sources, Timestamp now,
                                                BreakingParams const& params = {});

}  // namespace emm::cluster
