#include "emm/xlink.hpp"

#include "emm/sparse.hpp"

#include <algorithm>

namespace emm::xlink {

double combine(LinkParts const& p, LinkWeights const& w) {
  return w.subject * p.subject + w.country * p.country + w.entity * p.entity + w.keyword * p.keyword;
}

LinkScore link_score(ClusterSignature const& a, ClusterSignature const& b, LinkWeights const& weights) {
  LinkScore s;
  s.parts.subject = cosine(a.subject, b.subject);
  s.parts.country = cosine(a.country, b.country);
  s.parts.entity = cosine(a.entity, b.entity);
  s.parts.keyword = cosine(a.keyword, b.keyword);
  s.combined = combine(s.parts, weights);
  return s;
}

std::size_t language_pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

LinkResult link_clusters(ClustersByLanguage const& clusters, double tau, LinkWeights const& weights) {
  LinkResult r;
  for (auto a = clusters.begin(); a != clusters.end(); ++a) {
    for (auto b = std::next(a); b != clusters.end(); ++b) {
      ++r.language_pairs;
      for (auto const& ca : a->second) {
        for (auto const& cb : b->second) {
          auto const s = link_score(ca.signature, cb.signature, weights);
          if (s.combined < tau) continue;
          r.edges.push_back({ca.cluster_id, a->first, cb.cluster_id, b->first, s.combined, s.parts});
        }
      }
    }
  }
  return r;
}

std::map<std::string, LinkEdge> best_edges(std::span<LinkEdge const> edges) {
  std::map<std::string, LinkEdge> best;
  auto consider = [&](std::string const& self, std::string const& other, LinkEdge const& e) {
    auto const it = best.find(self);
    if (it == best.end()) {
      best.emplace(self, e);
      return;
    }
    auto const& cur = it->second;
    auto const& cur_other = cur.cluster_a == self ? cur.cluster_b : cur.cluster_a;
    if (e.combined > cur.combined || (e.combined == cur.combined && other < cur_other)) it->second = e;
  };
  for (auto const& e : edges) {
    consider(e.cluster_a, e.cluster_b, e);
    consider(e.cluster_b, e.cluster_a, e);
  }
  return best;
}

EntityProfile fuse_entity_profile(names::EntityId id, names::EntityStore const& store,
                                  std::map<std::string, std::string> const& cluster_language,
                                  std::span<quotes::QuoteRecord const> quotes,
                                  std::map<std::pair<names::EntityId, names::EntityId>, names::Cooccurrence> const& co,
                                  std::size_t top) {
  auto const* e = store.find(id);
  if (!e) throw NotFound("no entity " + std::to_string(id));
  EntityProfile p;
  p.entity = *e;
  for (auto const& ref : e->cluster_refs) {
    auto const it = cluster_language.find(ref);
    p.clusters_by_language[it == cluster_language.end() ? std::string() : it->second].insert(ref);
  }
  for (auto const& q : quotes) {
    if (q.entity_id == id) p.quotes.push_back(q);
  }
  for (auto const& [pair, c] : co) {
    if (pair.first == id) p.cooccurring.emplace_back(pair.second, c.weighted);
    if (pair.second == id) p.cooccurring.emplace_back(pair.first, c.weighted);
  }
  std::sort(p.cooccurring.begin(), p.cooccurring.end(), [](auto const& a, auto const& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (p.cooccurring.size() > top) p.cooccurring.resize(top);
  return p;
}

}  // namespace emm::xlink
