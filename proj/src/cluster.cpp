#include "emm/cluster.hpp"

#include "emm/sparse.hpp"
#include "emm/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>

namespace emm::cluster {
namespace {

using Sparse = std::vector<std::pair<int, double>>;  // sorted by feature id

double dot(Sparse const& a, Sparse const& b) {
  double s = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

Sparse add(Sparse const& a, Sparse const& b) {
  Sparse out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      out.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  return out;
}

// Exact candidate generation for pairs with cosine >= threshold over unit
// vectors (all-pairs search with prefix filtering). Features are ranked by
// document frequency, most frequent first; each vector indexes only the
// features after the prefix whose best possible contribution stays below the
// threshold, so no qualifying pair is missed.
std::vector<std::vector<int>> strong_edges(std::vector<Sparse> const& vecs, int features, double threshold) {
  std::size_t const n = vecs.size();
  std::vector<int> df(static_cast<std::size_t>(features), 0);
  std::vector<double> maxw(static_cast<std::size_t>(features), 0.0);
  for (auto const& v : vecs) {
    for (auto const& [f, w] : v) {
      ++df[static_cast<std::size_t>(f)];
      maxw[static_cast<std::size_t>(f)] = std::max(maxw[static_cast<std::size_t>(f)], w);
    }
  }
  std::vector<int> rank(static_cast<std::size_t>(features));
  {
    std::vector<int> order(static_cast<std::size_t>(features));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      auto const da = df[static_cast<std::size_t>(a)], db = df[static_cast<std::size_t>(b)];
      return da != db ? da > db : a < b;
    });
    for (std::size_t r = 0; r < order.size(); ++r) rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  }

  std::vector<std::vector<std::pair<int, double>>> index(static_cast<std::size_t>(features));
  std::vector<std::vector<int>> adj(n);
  std::vector<double> acc(n, 0.0);
  std::vector<int> touched;
  std::vector<std::pair<int, double>> ranked;

  for (std::size_t x = 0; x < n; ++x) {
    auto const& v = vecs[x];
    touched.clear();
    for (auto const& [f, w] : v) {
      for (auto const& [y, wy] : index[static_cast<std::size_t>(f)]) {
        if (acc[static_cast<std::size_t>(y)] == 0.0) touched.push_back(y);
        acc[static_cast<std::size_t>(y)] += w * wy;
      }
    }
    for (int y : touched) {
      acc[static_cast<std::size_t>(y)] = 0.0;
      if (dot(v, vecs[static_cast<std::size_t>(y)]) >= threshold) {
        adj[x].push_back(y);
        adj[static_cast<std::size_t>(y)].push_back(static_cast<int>(x));
      }
    }

    ranked.assign(v.begin(), v.end());
    std::sort(ranked.begin(), ranked.end(), [&](auto const& a, auto const& b) {
      return rank[static_cast<std::size_t>(a.first)] < rank[static_cast<std::size_t>(b.first)];
    });
    double bound = 0.0;
    for (auto const& [f, w] : ranked) {
      bound += w * maxw[static_cast<std::size_t>(f)];
      if (bound >= threshold) index[static_cast<std::size_t>(f)].emplace_back(static_cast<int>(x), w);
    }
  }
  return adj;
}

struct Candidate {
  double sim;
  std::size_t key_a, key_b;  // smallest member index of each side, key_a < key_b
  int a, b;                  // cluster slots
  unsigned ver_a, ver_b;
};

struct CandidateOrder {
  bool operator()(Candidate const& x, Candidate const& y) const {
    if (x.sim != y.sim) return x.sim < y.sim;
    return std::tie(x.key_a, x.key_b) > std::tie(y.key_a, y.key_b);
  }
};

constexpr double kTieEps = 1e-12;
constexpr double kEdgeSlack = 1e-9;

}  // namespace

std::vector<std::string> content_tokens(std::string_view title, std::string_view body) {
  std::vector<std::string> out;
  for (auto const* field : {&title, &body}) {
    for (auto const& tok : text::tokenize(*field)) {
      auto const u = text::to_u32(tok.text);
      if (std::none_of(u.begin(), u.end(), [](char32_t c) { return text::is_letter(c); })) continue;
      out.push_back(text::to_utf8(text::lower(u)));
    }
  }
  return out;
}

std::vector<std::string> content_tokens(Article const& article) { return content_tokens(article.title, article.body); }

KeywordVector term_frequency(std::span<std::string const> tokens) {
  KeywordVector v;
  for (auto const& t : tokens) v[t] += 1.0;
  return v;
}

KeywordVector vectorize(Article const& article, FrequencyModel const* background, Diagnostics* diagnostics) {
  auto const tokens = content_tokens(article);
  auto tf = term_frequency(tokens);
  if (background == nullptr || background->empty()) {
    if (diagnostics) {
      diagnostics->push_back({article.article_id, "no background model for language '" + article.language +
                                                      "'; using raw term frequency"});
    }
    return tf;
  }
  double const total = static_cast<double>(tokens.size());
  double const ref_total = static_cast<double>(background->total());
  KeywordVector v;
  for (auto const& [tok, count] : tf) {
    double const w = keyword_llr(count, total, static_cast<double>(background->count(tok)), ref_total);
    if (w >= kWeightEpsilon) v.emplace_hint(v.end(), tok, w);
  }
  return v;
}

BackgroundModels BackgroundModels::load(std::filesystem::path const& dir) {
  BackgroundModels models;
  if (!std::filesystem::is_directory(dir)) return models;
  for (auto const& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".tsv") continue;
    models.models_[entry.path().stem().string()] = FrequencyModel::load(entry.path());
  }
  return models;
}

FrequencyModel const* BackgroundModels::find(std::string const& language) const {
  auto const it = models_.find(language);
  return it == models_.end() ? nullptr : &it->second;
}

KeywordVector unit(KeywordVector v) {
  double norm = 0.0;
  for (auto const& [k, w] : v) norm += w * w;
  norm = std::sqrt(norm);
  if (norm <= 0.0) return {};
  for (auto& [k, w] : v) w /= norm;
  return v;
}

std::vector<std::vector<std::size_t>> agglomerate(std::span<KeywordVector const> vectors, double theta) {
  std::size_t const n = vectors.size();
  std::map<std::string, int> feature_ids;
  for (auto const& v : vectors) {
    for (auto const& [tok, w] : v) feature_ids.emplace(tok, 0);
  }
  int next_id = 0;
  for (auto& [tok, id] : feature_ids) id = next_id++;

  std::vector<Sparse> unit_vecs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto const& [tok, w] : unit(vectors[i])) unit_vecs[i].emplace_back(feature_ids[tok], w);
  }

  auto const adj = strong_edges(unit_vecs, next_id, theta - kEdgeSlack);

  // Cluster slots: slot i starts as article i; a merge keeps the slot with the
  // smaller key and retires the other.
  std::vector<Sparse> sums = unit_vecs;
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<std::set<int>> neighbours(n);
  std::vector<unsigned> version(n, 0);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = {i};
    for (int j : adj[i]) neighbours[i].insert(j);
  }

  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> heap;
  auto similarity = [&](int a, int b) {
    double const na = static_cast<double>(members[static_cast<std::size_t>(a)].size());
    double const nb = static_cast<double>(members[static_cast<std::size_t>(b)].size());
    return dot(sums[static_cast<std::size_t>(a)], sums[static_cast<std::size_t>(b)]) / (na * nb);
  };
  auto push = [&](int a, int b) {
    auto ka = members[static_cast<std::size_t>(a)].front();
    auto kb = members[static_cast<std::size_t>(b)].front();
    if (kb < ka) {
      std::swap(a, b);
      std::swap(ka, kb);
    }
    double const s = similarity(a, b);
    if (s < theta - kTieEps) return;
    heap.push({s, ka, kb, a, b, version[static_cast<std::size_t>(a)], version[static_cast<std::size_t>(b)]});
  };
  auto valid = [&](Candidate const& c) {
    return alive[static_cast<std::size_t>(c.a)] && alive[static_cast<std::size_t>(c.b)] &&
           version[static_cast<std::size_t>(c.a)] == c.ver_a && version[static_cast<std::size_t>(c.b)] == c.ver_b;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (int j : neighbours[i]) {
      if (static_cast<std::size_t>(j) > i) push(static_cast<int>(i), j);
    }
  }

  std::vector<Candidate> near_ties;
  while (!heap.empty()) {
    Candidate best = heap.top();
    heap.pop();
    if (!valid(best)) continue;
    // Collect near-equal candidates and keep the smallest pair key among them.
    near_ties.clear();
    while (!heap.empty() && heap.top().sim >= best.sim - kTieEps) {
      Candidate c = heap.top();
      heap.pop();
      if (!valid(c)) continue;
      if (std::tie(c.key_a, c.key_b) < std::tie(best.key_a, best.key_b)) std::swap(c, best);
      near_ties.push_back(c);
    }
    for (auto const& c : near_ties) heap.push(c);
    if (best.sim < theta - kTieEps) break;

    auto const a = static_cast<std::size_t>(best.a);
    auto const b = static_cast<std::size_t>(best.b);
    sums[a] = add(sums[a], sums[b]);
    Sparse().swap(sums[b]);
    auto& ma = members[a];
    ma.insert(ma.end(), members[b].begin(), members[b].end());
    std::sort(ma.begin(), ma.end());
    members[b].clear();
    alive[b] = false;
    ++version[a];

    neighbours[a].insert(neighbours[b].begin(), neighbours[b].end());
    neighbours[a].erase(best.a);
    neighbours[a].erase(best.b);
    for (int c : neighbours[b]) {
      neighbours[static_cast<std::size_t>(c)].erase(best.b);
      if (c != best.a) neighbours[static_cast<std::size_t>(c)].insert(best.a);
    }
    neighbours[b].clear();
    for (int c : neighbours[a]) push(best.a, c);
  }

  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) groups.push_back(std::move(members[i]));
  }
  std::sort(groups.begin(), groups.end(), [](auto const& x, auto const& y) {
    return x.size() != y.size() ? x.size() > y.size() : x.front() < y.front();
  });
  return groups;
}

std::vector<Cluster> cluster_window(std::span<Article const* const> articles, std::span<KeywordVector const> vectors,
                                    double theta, Timestamp round) {
  if (articles.size() != vectors.size()) throw Error("cluster_window: articles and vectors differ in length");
  auto const groups = agglomerate(vectors, theta);
  std::vector<Cluster> out;
  out.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto const& idx = groups[g];
    Cluster c;
    c.language = articles[idx.front()]->language;
    c.round = round;
    c.cluster_id = c.language + "-" + std::to_string(round) + "-" + std::to_string(g);

    KeywordVector mean;
    for (auto i : idx) {
      for (auto const& [tok, w] : unit(vectors[i])) mean[tok] += w;
    }
    c.centroid = unit(std::move(mean));
    for (auto it = c.centroid.begin(); it != c.centroid.end();) {
      it = it->second < kWeightEpsilon ? c.centroid.erase(it) : std::next(it);
    }

    std::size_t best = idx.front();
    double best_sim = -1.0;
    for (auto i : idx) {
      double const s = cosine(vectors[i], c.centroid);
      Article const& cand = *articles[i];
      Article const& cur = *articles[best];
      bool take = false;
      if (s > best_sim + kTieEps) {
        take = true;
      } else if (s >= best_sim - kTieEps) {
        take = std::tie(cand.published_at, cand.article_id) < std::tie(cur.published_at, cur.article_id);
      }
      if (take) {
        best = i;
        best_sim = std::max(s, best_sim);
      }
    }
    c.medoid_article_id = articles[best]->article_id;
    c.title = articles[best]->title;
    for (auto i : idx) c.members.push_back(articles[i]->article_id);
    std::sort(c.members.begin(), c.members.end());
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Article const*> select_window(std::span<Article const* const> articles, Timestamp now, Timestamp window,
                                          std::size_t min_articles) {
  std::vector<Article const*> past;
  for (auto const* a : articles) {
    if (a->published_at <= now) past.push_back(a);
  }
  std::sort(past.begin(), past.end(), [](Article const* x, Article const* y) {
    return std::tie(y->published_at, y->article_id) < std::tie(x->published_at, x->article_id);
  });
  std::size_t keep = 0;
  while (keep < past.size() && past[keep]->published_at > now - window) ++keep;
  keep = std::max(keep, std::min(min_articles, past.size()));
  // Never split a group of articles sharing the boundary timestamp.
  while (keep > 0 && keep < past.size() && past[keep]->published_at == past[keep - 1]->published_at) ++keep;
  past.resize(keep);
  std::sort(past.begin(), past.end(), [](Article const* x, Article const* y) { return x->article_id < y->article_id; });
  return past;
}

void chain_clusters(std::vector<Cluster>& current, std::span<Cluster const> previous,
                    std::set<std::string> const& in_window, ChainParams const& params) {
  std::vector<int> link(current.size(), -1);
  std::vector<std::size_t> overlap_count(current.size(), 0);

  for (std::size_t ci = 0; ci < current.size(); ++ci) {
    auto const& c = current[ci];
    std::set<std::string> const mine(c.members.begin(), c.members.end());
    double best_frac = -1.0;
    for (std::size_t pi = 0; pi < previous.size(); ++pi) {
      auto const& p = previous[pi];
      std::size_t overlap = 0;
      for (auto const& id : p.members) overlap += mine.count(id);
      if (overlap == 0) continue;
      double const frac = static_cast<double>(overlap) / static_cast<double>(c.members.size());
      if (frac < params.min_overlap - 1e-12) continue;
      bool better = false;
      if (link[ci] < 0 || frac > best_frac + 1e-12) {
        better = true;
      } else if (frac >= best_frac - 1e-12) {
        auto const& q = previous[static_cast<std::size_t>(link[ci])];
        better = std::make_tuple(p.size(), -p.chain_started) > std::make_tuple(q.size(), -q.chain_started) ||
                 (p.size() == q.size() && p.chain_started == q.chain_started && p.chain_id < q.chain_id);
      }
      if (better) {
        link[ci] = static_cast<int>(pi);
        best_frac = std::max(frac, best_frac);
        overlap_count[ci] = overlap;
      }
    }
  }

  // Out-of-window members of each linked predecessor go to the current cluster
  // with the largest overlap (first in order on ties).
  std::map<int, std::size_t> heir;
  for (std::size_t ci = 0; ci < current.size(); ++ci) {
    if (link[ci] < 0) continue;
    auto const it = heir.find(link[ci]);
    if (it == heir.end() || overlap_count[ci] > overlap_count[it->second]) heir[link[ci]] = ci;
  }

  for (std::size_t ci = 0; ci < current.size(); ++ci) {
    auto& c = current[ci];
    if (link[ci] < 0) {
      c.fresh_chain = true;
      c.chain_id = "story-" + c.cluster_id;
      c.chain_started = c.round;
      c.size_history.clear();
    } else {
      auto const& p = previous[static_cast<std::size_t>(link[ci])];
      c.fresh_chain = false;
      c.chain_id = p.chain_id;
      c.chain_started = p.chain_started;
      c.size_history = p.size_history;
      if (heir[link[ci]] == ci) {
        std::set<std::string> att(c.attached.begin(), c.attached.end());
        std::set<std::string> const mine(c.members.begin(), c.members.end());
        for (auto const* list : {&p.members, &p.attached}) {
          for (auto const& id : *list) {
            if (!in_window.count(id) && !mine.count(id)) att.insert(id);
          }
        }
        c.attached.assign(att.begin(), att.end());
      }
    }
    while (!c.size_history.empty() && c.size_history.back().at >= c.round) c.size_history.pop_back();
    c.size_history.push_back({c.round, c.size()});
  }
}

std::string to_string(BreakingReason reason) {
  return reason == BreakingReason::NewLarge ? "new-large" : "rapid-rise";
}

std::size_t size_at(std::span<SizePoint const> history, Timestamp t) {
  auto const it = std::upper_bound(history.begin(), history.end(), t,
                                   [](Timestamp v, SizePoint const& p) { return v < p.at; });
  return it == history.begin() ? 0 : std::prev(it)->size;
}

std::optional<BreakingNewsFlag> detect_breaking(Cluster const& cluster, std::size_t distinct_sources, Timestamp now,
                                                BreakingParams const& params) {
  std::size_t const size = cluster.size();
  auto const& h = cluster.size_history;
  std::size_t const now_size = h.empty() ? size : size_at(h, now);
  std::size_t const before = size_at(h, now - params.recent);
  std::size_t const base_start = size_at(h, now - params.recent - params.baseline);
  std::size_t const added = now_size > before ? now_size - before : 0;
  double const periods = static_cast<double>(params.baseline) / static_cast<double>(params.recent);
  double const rate = before > base_start ? static_cast<double>(before - base_start) / periods : 0.0;

  BreakingNewsFlag flag;
  flag.cluster_id = cluster.cluster_id;
  flag.articles_30min = added;
  flag.distinct_sources = distinct_sources;
  if (cluster.fresh_chain && size >= params.min_size && distinct_sources >= params.min_sources) {
    flag.reason = BreakingReason::NewLarge;
    return flag;
  }
  if (!cluster.fresh_chain && size >= params.min_size &&
      static_cast<double>(added) >= params.rise_factor * std::max(rate, params.baseline_floor)) {
    flag.reason = BreakingReason::RapidRise;
    return flag;
  }
  return std::nullopt;
}

}  // namespace emm::cluster
