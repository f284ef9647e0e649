#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <unordered_map>
#include <vector>

#include "rcmatch/construct.hpp"
#include "rcmatch/error.hpp"
#include "rcmatch/multigraph.hpp"
#include "rcmatch/reduce.hpp"
#include "rcmatch/rng.hpp"

namespace rcm {

namespace detail {

/// Simple projection of a multigraph on dense labels 0..n-1. Each neighbor
/// pair keeps the smallest EdgeId joining the two vertices.
struct SimpleProjection {
  std::vector<VertexId> label;                              // dense -> VertexId
  std::vector<std::vector<std::pair<int, EdgeId>>> adj;     // dense adjacency

  explicit SimpleProjection(const MultiGraph& g) {
    std::vector<int> dense(g.vertex_capacity(), -1);
    for (VertexId v : g.vertices()) {
      dense[v.value] = static_cast<int>(label.size());
      label.push_back(v);
    }
    adj.resize(label.size());
    std::unordered_map<std::uint64_t, EdgeId> best;
    best.reserve(g.num_edges());
    for (EdgeId e : g.edges()) {
      auto [a, b] = g.endpoints(e);
      int x = dense[a.value], y = dense[b.value];
      if (x > y) std::swap(x, y);
      const std::uint64_t key = (static_cast<std::uint64_t>(x) << 32) | static_cast<std::uint32_t>(y);
      auto [it, fresh] = best.try_emplace(key, e);
      if (!fresh && e < it->second) it->second = e;
    }
    for (const auto& [key, e] : best) {
      const int x = static_cast<int>(key >> 32), y = static_cast<int>(key & 0xFFFFFFFFu);
      adj[x].emplace_back(y, e);
      adj[y].emplace_back(x, e);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
  }

  int size() const { return static_cast<int>(label.size()); }
};

/// Edmonds' blossom algorithm over a SimpleProjection, one BFS per free root.
class Blossom {
 public:
  explicit Blossom(const SimpleProjection& p)
      : p_(p), n_(p.size()), match_(n_, -1), parent_(n_), base_(n_), used_(n_), in_blossom_(n_), mark_(n_) {}

  std::vector<int> solve() {
    // Greedy start leaves few roots for the augmenting search.
    for (int v = 0; v < n_; ++v) {
      if (match_[v] != -1) continue;
      for (const auto& [w, e] : p_.adj[v]) {
        if (match_[w] == -1) {
          match_[v] = w;
          match_[w] = v;
          break;
        }
      }
    }
    for (int root = 0; root < n_; ++root) {
      if (match_[root] != -1) continue;
      const int end = find_path(root);
      for (int v = end; v != -1;) {
        const int pv = parent_[v], ppv = match_[pv];
        match_[v] = pv;
        match_[pv] = v;
        v = ppv;
      }
    }
    return match_;
  }

 private:
  int lca(int a, int b) {
    ++stamp_;
    for (;;) {
      a = base_[a];
      mark_[a] = stamp_;
      if (match_[a] == -1) break;
      a = parent_[match_[a]];
    }
    for (;;) {
      b = base_[b];
      if (mark_[b] == stamp_) return b;
      b = parent_[match_[b]];
    }
  }

  void mark_path(int v, int b, int child) {
    while (base_[v] != b) {
      in_blossom_[base_[v]] = in_blossom_[base_[match_[v]]] = 1;
      parent_[v] = child;
      child = match_[v];
      v = parent_[match_[v]];
    }
  }

  /// Returns the free vertex ending an augmenting path from root, or -1.
  int find_path(int root) {
    std::fill(used_.begin(), used_.end(), 0);
    std::fill(parent_.begin(), parent_.end(), -1);
    for (int i = 0; i < n_; ++i) base_[i] = i;
    used_[root] = 1;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (const auto& [to, e] : p_.adj[v]) {
        if (base_[v] == base_[to] || match_[v] == to) continue;
        if (to == root || (match_[to] != -1 && parent_[match_[to]] != -1)) {
          const int b = lca(v, to);
          std::fill(in_blossom_.begin(), in_blossom_.end(), 0);
          mark_path(v, b, to);
          mark_path(to, b, v);
          for (int i = 0; i < n_; ++i) {
            if (in_blossom_[base_[i]]) {
              base_[i] = b;
              if (!used_[i]) {
                used_[i] = 1;
                q.push(i);
              }
            }
          }
        } else if (parent_[to] == -1) {
          parent_[to] = v;
          if (match_[to] == -1) return to;
          used_[match_[to]] = 1;
          q.push(match_[to]);
        }
      }
    }
    return -1;
  }

  const SimpleProjection& p_;
  int n_;
  std::vector<int> match_, parent_, base_;
  std::vector<char> used_, in_blossom_;
  std::vector<std::uint64_t> mark_;
  std::uint64_t stamp_ = 0;
};

}  // namespace detail

/// Maximum-cardinality matching. Parallel edges collapse to their smallest
/// EdgeId for the search; that EdgeId is the one reported.
inline Matching max_matching_exact(const MultiGraph& g) {
  const detail::SimpleProjection p(g);
  const std::vector<int> mate = detail::Blossom(p).solve();
  Matching m;
  for (int x = 0; x < p.size(); ++x) {
    if (mate[x] == -1) continue;
    m.covered.push_back(p.label[x]);
    if (x > mate[x]) continue;
    const auto& row = p.adj[x];
    auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(mate[x], EdgeId{0}));
    m.edges.push_back(it->second);
  }
  std::sort(m.edges.begin(), m.edges.end());
  return m;
}

/// Exact maximum matching size by memoized search over vertex subsets.
inline std::size_t brute_force_matching(const MultiGraph& g) {
  constexpr std::size_t kLimit = 16;
  if (g.num_vertices() > kLimit)
    throw Error(Errc::TooLarge, "brute force matching supports at most 16 vertices");
  const detail::SimpleProjection p(g);
  const int n = p.size();
  std::vector<std::uint32_t> nbr(n, 0);
  for (int x = 0; x < n; ++x)
    for (const auto& [y, e] : p.adj[x]) nbr[x] |= 1u << y;

  std::vector<std::int8_t> memo(std::size_t{1} << n, -1);
  memo[0] = 0;
  // Subsets in increasing order: every proper subset is solved first.
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int v = __builtin_ctz(mask);
    const std::uint32_t rest = mask & ~(1u << v);
    std::int8_t best = memo[rest];
    for (std::uint32_t cand = nbr[v] & rest; cand != 0; cand &= cand - 1) {
      const int w = __builtin_ctz(cand);
      best = std::max<std::int8_t>(best, static_cast<std::int8_t>(1 + memo[rest & ~(1u << w)]));
    }
    memo[mask] = best;
  }
  return static_cast<std::size_t>(memo[(std::size_t{1} << n) - 1]);
}

struct FallbackResult {
  Matching matching;
  std::size_t reduce_construct_size = 0;
  bool used_fallback = false;
};

/// Reduce-Construct, replaced by the exact matching whenever its output is
/// not of size floor(n/2).
inline FallbackResult match_with_fallback(const MultiGraph& g, Rng& rng, const ReduceOptions& opts = {}) {
  FallbackResult r;
  ReduceOptions quiet = opts;
  quiet.capture_trace = false;
  r.matching = reduce_construct(g, rng, quiet).matching;
  r.reduce_construct_size = r.matching.size();
  if (r.matching.size() != g.num_vertices() / 2) {
    r.matching = max_matching_exact(g);
    r.used_fallback = true;
  }
  return r;
}

}  // namespace rcm
