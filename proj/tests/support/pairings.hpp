#pragma once

// Exact distribution of the loop-free configuration model, by enumerating
// every perfect matching of the configuration points.

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "rcmatch/multigraph.hpp"

namespace rcm::testing {

using EdgeMultiset = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

inline EdgeMultiset canonical(EdgeMultiset edges) {
  for (auto& [a, b] : edges)
    if (a > b) std::swap(a, b);
  std::sort(edges.begin(), edges.end());
  return edges;
}

inline EdgeMultiset canonical(const MultiGraph& g) {
  EdgeMultiset out;
  for (EdgeId e : g.edges()) {
    auto [a, b] = g.endpoints(e);
    out.emplace_back(a.value, b.value);
  }
  return canonical(std::move(out));
}

/// Probability of each loop-free multigraph under uniform loop-free pairings.
inline std::map<EdgeMultiset, double> loop_free_distribution(const std::vector<std::size_t>& degrees) {
  std::vector<std::uint32_t> owner;
  for (std::uint32_t v = 0; v < degrees.size(); ++v) owner.insert(owner.end(), degrees[v], v);
  std::map<EdgeMultiset, double> counts;
  std::vector<bool> used(owner.size(), false);
  EdgeMultiset current;
  double total = 0.0;

  auto rec = [&](auto&& self) -> void {
    std::size_t first = 0;
    while (first < owner.size() && used[first]) ++first;
    if (first == owner.size()) {
      counts[canonical(current)] += 1.0;
      total += 1.0;
      return;
    }
    used[first] = true;
    for (std::size_t j = first + 1; j < owner.size(); ++j) {
      if (used[j] || owner[j] == owner[first]) continue;
      used[j] = true;
      current.emplace_back(owner[first], owner[j]);
      self(self);
      current.pop_back();
      used[j] = false;
    }
    used[first] = false;
  };
  rec(rec);
  for (auto& [g, c] : counts) c /= total;
  return counts;
}

}  // namespace rcm::testing
