#pragma once

#include <algorithm>
#include <cmath>
#include <map>

namespace emm {

// Cosine similarity of two sparse non-negative vectors held in ordered maps.
// Both operands are walked in key order, so cosine(u, v) == cosine(v, u)
// bit for bit. Returns 0 when either vector is empty or all-zero.
template <class K, class A, class B>
double cosine(std::map<K, A> const& u, std::map<K, B> const& v) {
  double dot = 0.0;
  auto i = u.begin();
  auto j = v.begin();
  while (i != u.end() && j != v.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      dot += static_cast<double>(i->second) * static_cast<double>(j->second);
      ++i;
      ++j;
    }
  }
  if (dot <= 0.0) return 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (auto const& [k, x] : u) nu += static_cast<double>(x) * static_cast<double>(x);
  for (auto const& [k, x] : v) nv += static_cast<double>(x) * static_cast<double>(x);
  double const denom = std::sqrt(nu) * std::sqrt(nv);
  if (denom <= 0.0) return 0.0;
  return std::clamp(dot / denom, 0.0, 1.0);
}

}  // namespace emm
