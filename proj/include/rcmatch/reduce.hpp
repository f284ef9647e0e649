#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "rcmatch/error.hpp"
#include "rcmatch/genmodel.hpp"
#include "rcmatch/multigraph.hpp"
#include "rcmatch/rng.hpp"

namespace rcm {

// ---------------------------------------------------------------------------
// Actions

/// Removal of an isolated vertex.
struct VertexZero {
  VertexId v;
  friend bool operator==(const VertexZero&, const VertexZero&) = default;
};

/// Removal of a vertex v whose only neighbor is w (degree 1, or degree 2
/// through a parallel pair), together with w and every edge at either.
/// `matched_edge` is the v-w edge that Construct may later add.
struct VertexOne {
  VertexId v;
  VertexId w;
  EdgeId matched_edge;
  std::vector<EdgeRecord> removed_edges;
  friend bool operator==(const VertexOne&, const VertexOne&) = default;
};

/// Contraction of a degree-2 vertex with its neighborhood. `neighbors` has
/// two entries. Reduce never contracts a pair, but a one-entry `neighbors`
/// (merging v into its only neighbor) is still accepted when replaying and
/// unwinding.
struct Contraction {
  VertexId contracted;
  std::vector<VertexId> neighbors;
  VertexId new_vertex;
  std::size_t internal_dropped = 0;
  std::vector<EdgeRecord> dropped;
  std::vector<Absorbed> absorbed;

  bool is_pair() const { return neighbors.size() == 1; }
  /// Number of edges joining the two neighbors.
  std::size_t eta() const { return internal_dropped >= 2 ? internal_dropped - 2 : 0; }
  friend bool operator==(const Contraction&, const Contraction&) = default;
};

/// Removal of edge {v,u}, v being a uniformly chosen max-degree vertex.
struct MaxEdgeRemoval {
  VertexId v;
  VertexId u;
  EdgeId edge;
  std::size_t deg_v_before = 0;
  std::size_t deg_u_before = 0;
  friend bool operator==(const MaxEdgeRemoval&, const MaxEdgeRemoval&) = default;
};

/// Contraction of {u, v, w} right after removing {v,u} left u with exactly
/// two edges, both running to w.
struct AutoCorrection {
  VertexId u;
  VertexId v;
  VertexId w;
  VertexId new_vertex;
  std::size_t internal_dropped = 0;
  std::vector<EdgeRecord> dropped;
  std::vector<Absorbed> absorbed;
  friend bool operator==(const AutoCorrection&, const AutoCorrection&) = default;
};

using Action = std::variant<VertexZero, VertexOne, Contraction, MaxEdgeRemoval, AutoCorrection>;

constexpr std::string_view action_tag(const Action& a) {
  constexpr std::array<std::string_view, 5> tags{"vertex_zero", "vertex_one", "contraction", "max_edge_removal",
                                                 "auto_correction"};
  return tags[a.index()];
}

// ---------------------------------------------------------------------------
// Hyperactions

enum class HyperKind : std::uint8_t { Initial, T1, T2, T3a, T3b, T3c, T4, Bad };

inline constexpr std::size_t kHyperKindCount = 8;

constexpr std::string_view to_string(HyperKind k) {
  constexpr std::array<std::string_view, kHyperKindCount> names{"initial", "T1", "T2", "T3a", "T3b", "T3c", "T4", "bad"};
  return names[static_cast<std::size_t>(k)];
}

/// Types 1, 2, 3a, 3b and 4 are good; 3c and everything unlisted are bad.
/// Type 4 allows one of its two contractions to drop a single a-b edge.
constexpr bool is_good(HyperKind k) {
  return k == HyperKind::T1 || k == HyperKind::T2 || k == HyperKind::T3a || k == HyperKind::T3b || k == HyperKind::T4;
}

constexpr bool is_type3(HyperKind k) { return k == HyperKind::T3a || k == HyperKind::T3b || k == HyperKind::T3c; }

struct Hyperaction {
  std::size_t begin = 0;  ///< first action index
  std::size_t end = 0;    ///< one past the last action index
  HyperKind kind = HyperKind::Initial;
  std::size_t index = 0;  ///< position in the Gamma sequence
};

namespace detail {
inline bool good_contraction(const Action& a) {
  const auto* c = std::get_if<Contraction>(&a);
  return c != nullptr && !c->is_pair() && c->eta() <= 1;
}
}  // namespace detail

/// Kind of one hyperaction. `actions` is the full slice: a leading
/// max-edge removal for every non-initial hyperaction.
inline HyperKind classify(std::span<const Action> actions, bool initial) {
  if (initial) return HyperKind::Initial;
  if (actions.empty() || !std::holds_alternative<MaxEdgeRemoval>(actions[0]))
    throw Error(Errc::MalformedLog, "hyperaction does not start with a max-edge removal");
  const auto rest = actions.subspan(1);
  if (rest.empty()) return HyperKind::T1;
  if (rest.size() == 1) {
    if (std::holds_alternative<AutoCorrection>(rest[0])) return HyperKind::T2;
    if (const auto* c = std::get_if<Contraction>(&rest[0]); c != nullptr && !c->is_pair()) {
      if (c->eta() == 0) return HyperKind::T3a;
      if (c->eta() == 1) return HyperKind::T3b;
      return HyperKind::T3c;
    }
    return HyperKind::Bad;
  }
  if (rest.size() == 2 && detail::good_contraction(rest[0]) && detail::good_contraction(rest[1]) &&
      std::get<Contraction>(rest[0]).eta() + std::get<Contraction>(rest[1]).eta() <= 1)
    return HyperKind::T4;
  return HyperKind::Bad;
}

/// Partitions a complete log into hyperactions and classifies each one.
inline std::vector<Hyperaction> group_and_classify(std::span<const Action> actions) {
  std::vector<Hyperaction> out;
  std::size_t start = 0;
  bool initial = true;
  auto close = [&](std::size_t end) {
    Hyperaction h;
    h.begin = start;
    h.end = end;
    h.index = out.size();
    h.kind = classify(actions.subspan(start, end - start), initial);
    out.push_back(h);
    start = end;
    initial = false;
  };
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (std::holds_alternative<AutoCorrection>(actions[i]) &&
        (i == 0 || !std::holds_alternative<MaxEdgeRemoval>(actions[i - 1])))
      throw Error(Errc::MalformedLog, "auto correction at action " + std::to_string(i) +
                                          " does not follow a max-edge removal");
    if (std::holds_alternative<MaxEdgeRemoval>(actions[i])) close(i);
  }
  close(actions.size());
  return out;
}

// ---------------------------------------------------------------------------
// Trace

/// Statistics of one graph Gamma_i of the min-degree->=3 subsequence.
struct TraceRecord {
  std::size_t i = 0;
  std::size_t edges = 0;     ///< e_i
  std::size_t vertices = 0;  ///< |V(Gamma_i)|
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;
  HyperKind kind = HyperKind::Initial;  ///< kind of the hyperaction that produced Gamma_i
  std::vector<std::uint32_t> hist;      ///< n_{j,i}, j = 0..max_degree
  std::vector<std::uint32_t> excess;    ///< ex_{l,i}, l = 0..k
  std::uint32_t dominant_strict = 0;    ///< bit l set iff Gamma_i in C_{3,l} with zero slack
  std::uint32_t dominant_slack = 0;     ///< bit l set iff Gamma_i in C_{3,l}

  std::size_t n(std::size_t j) const { return j < hist.size() ? hist[j] : 0; }
  double p(std::size_t j) const {
    return edges == 0 ? 0.0 : static_cast<double>(j * n(j)) / static_cast<double>(2 * edges);
  }
  double p_above(std::size_t j) const {
    double s = 0.0;
    for (std::size_t h = j + 1; h < hist.size(); ++h) s += p(h);
    return s;
  }
  std::size_t ex(std::size_t ell) const {
    if (ell < excess.size()) return excess[ell];
    std::size_t s = 0;
    for (std::size_t d = ell + 1; d < hist.size(); ++d) s += (d - ell) * hist[d];
    return s;
  }
  bool dominant(std::size_t ell, bool strict) const {
    if (ell <= 3) return true;
    if (ell >= 32) return false;
    return ((strict ? dominant_strict : dominant_slack) >> ell) & 1u;
  }
};

// ---------------------------------------------------------------------------
// Reduce

struct ActionLog {
  std::vector<Action> actions;
  /// boundaries[i] is the action index at which Gamma_i is reached; the last
  /// entry equals actions.size() and marks the empty final graph.
  std::vector<std::size_t> boundaries;
};

struct StepResult {
  Action action;
  std::optional<Action> correction;
};

namespace detail {

inline std::vector<EdgeRecord> remove_all_edges(MultiGraph& g, VertexId v) {
  std::vector<EdgeRecord> out;
  while (g.degree(v) > 0) {
    const EdgeId e = g.incident(v).back();
    auto [a, b] = g.endpoints(e);
    out.push_back(EdgeRecord{e, a, b});
    g.remove_edge(e);
  }
  return out;
}

/// Removes v, its only neighbor and every edge at either; `matched` joins them.
inline VertexOne remove_pendant(MultiGraph& g, VertexId v, EdgeId matched) {
  VertexOne a;
  a.v = v;
  a.matched_edge = matched;
  a.w = g.other_end(matched, v);
  a.removed_edges = remove_all_edges(g, a.w);
  auto rest = remove_all_edges(g, a.v);
  a.removed_edges.insert(a.removed_edges.end(), rest.begin(), rest.end());
  g.remove_vertex(a.v);
  g.remove_vertex(a.w);
  return a;
}

inline Contraction contract_around(MultiGraph& g, VertexId v) {
  const auto inc = g.incident(v);
  Contraction c;
  c.contracted = v;
  c.neighbors.push_back(g.other_end(inc[0], v));
  const VertexId second = g.other_end(inc[1], v);
  if (second != c.neighbors[0]) c.neighbors.push_back(second);
  std::vector<VertexId> set{v};
  set.insert(set.end(), c.neighbors.begin(), c.neighbors.end());
  ContractResult r = g.contract_set(set);
  c.new_vertex = r.merged;
  c.internal_dropped = r.internal_dropped;
  c.dropped = std::move(r.dropped);
  c.absorbed = std::move(r.absorbed);
  return c;
}

}  // namespace detail

/// Applies one action chosen by the current minimum degree, plus the auto
/// correction contraction when a max-edge removal calls for it.
inline StepResult reduce_step(MultiGraph& g, Rng& rng) {
  if (g.empty()) throw Error(Errc::EmptyGraph, "reduce_step on an empty graph");
  const std::size_t delta = g.min_degree();
  if (delta == 0) {
    const VertexId v = g.random_vertex_with_degree(0, rng);
    g.remove_vertex(v);
    return {VertexZero{v}, std::nullopt};
  }
  if (delta == 1) {
    const VertexId v = g.random_vertex_with_degree(1, rng);
    return {detail::remove_pendant(g, v, g.incident(v)[0]), std::nullopt};
  }
  if (delta == 2) {
    const VertexId v = g.random_vertex_with_degree(2, rng);
    const auto inc = g.incident(v);
    // Both edges run to one neighbor: v can only ever be matched there.
    if (g.other_end(inc[0], v) == g.other_end(inc[1], v)) return {detail::remove_pendant(g, v, inc[rng.index(2)]), std::nullopt};
    return {detail::contract_around(g, v), std::nullopt};
  }

  MaxEdgeRemoval m;
  m.v = g.random_max_degree_vertex(rng);
  m.edge = g.random_incident_edge(m.v, rng);
  m.u = g.other_end(m.edge, m.v);
  m.deg_v_before = g.degree(m.v);
  m.deg_u_before = g.degree(m.u);
  g.remove_edge(m.edge);

  StepResult out{m, std::nullopt};
  if (g.degree(m.u) == 2) {
    const auto inc = g.incident(m.u);
    const VertexId w = g.other_end(inc[0], m.u);
    if (w == g.other_end(inc[1], m.u) && w != m.v) {
      const std::array<VertexId, 3> set{m.u, m.v, w};
      ContractResult r = g.contract_set(set);
      AutoCorrection ac;
      ac.u = m.u;
      ac.v = m.v;
      ac.w = w;
      ac.new_vertex = r.merged;
      ac.internal_dropped = r.internal_dropped;
      ac.dropped = std::move(r.dropped);
      ac.absorbed = std::move(r.absorbed);
      out.correction = std::move(ac);
    }
  }
  return out;
}

struct ReduceOptions {
  /// Class index for excess and dominance monitors; 0 means the input's max degree.
  std::size_t k = 0;
  /// Vertex count used by the n^0.9 and log^2 n thresholds; 0 means the input's.
  std::size_t n0 = 0;
  bool capture_trace = true;
  /// Re-verify every graph invariant after each action. O(n) per action.
  bool debug_checks = false;
};

struct ReduceResult {
  ActionLog log;
  std::vector<TraceRecord> trace;
  std::size_t k = 0;
  std::size_t n0 = 0;
};

namespace detail {

class TraceRecorder {
 public:
  TraceRecorder(std::size_t k, std::size_t n0) : k_(k), n0_(n0) {
    slack_.assign(k_ + 1, std::vector<double>(k_ + 1, 0.0));
    for (std::size_t l = 4; l <= k_; ++l)
      for (std::size_t j = 4; j <= l; ++j) slack_[l][j] = dominance_slack(l, j, n0_);
  }

  TraceRecord capture(const MultiGraph& g, std::size_t index, HyperKind kind) const {
    TraceRecord r;
    r.i = index;
    r.kind = kind;
    r.edges = g.num_edges();
    r.vertices = g.num_vertices();
    r.min_degree = g.min_degree();
    r.max_degree = g.max_degree();
    if (!g.empty()) {
      r.hist.resize(r.max_degree + 1);
      for (std::size_t d = 0; d <= r.max_degree; ++d) r.hist[d] = static_cast<std::uint32_t>(g.count_with_degree(d));
    }
    r.excess.assign(k_ + 1, 0);
    for (std::size_t l = 0; l <= k_; ++l) {
      std::size_t s = 0;
      for (std::size_t d = l + 1; d < r.hist.size(); ++d) s += (d - l) * r.hist[d];
      r.excess[l] = static_cast<std::uint32_t>(s);
    }
    // Strict dominance of C_{3,l} is a prefix conjunction over j.
    bool strict_ok = true;
    for (std::size_t l = 3; l <= k_ && l < 32; ++l) {
      if (l >= 4) strict_ok = strict_ok && kAlphaDen * static_cast<std::int64_t>(r.n(l)) >=
                                               kAlphaNum * static_cast<std::int64_t>(r.n(l - 1));
      if (strict_ok) r.dominant_strict |= 1u << l;
      bool slack_ok = true;
      for (std::size_t j = 4; j <= l && slack_ok; ++j)
        slack_ok = static_cast<double>(r.n(j)) >= kAlpha * static_cast<double>(r.n(j - 1)) - slack_[l][j];
      if (slack_ok) r.dominant_slack |= 1u << l;
    }
    return r;
  }

 private:
  std::size_t k_;
  std::size_t n0_;
  std::vector<std::vector<double>> slack_;
};

}  // namespace detail

/// Runs Reduce until the graph is empty. `g` is consumed (left empty).
/// One TraceRecord is captured per hyperaction boundary, i.e. per Gamma_i,
/// including the final empty graph.
inline ReduceResult run_reduce(MultiGraph& g, Rng& rng, const ReduceOptions& opts = {}) {
  ReduceResult res;
  res.k = opts.k != 0 ? opts.k : std::max<std::size_t>(g.max_degree(), 3);
  res.n0 = opts.n0 != 0 ? opts.n0 : g.num_vertices();
  const detail::TraceRecorder recorder(res.k, res.n0);
  auto& actions = res.log.actions;

  std::size_t start = 0;
  bool initial = true;
  auto boundary = [&] {
    const HyperKind kind = classify(std::span<const Action>(actions).subspan(start), initial);
    if (opts.capture_trace) res.trace.push_back(recorder.capture(g, res.log.boundaries.size(), kind));
    res.log.boundaries.push_back(actions.size());
    start = actions.size();
    initial = false;
  };

  while (!g.empty()) {
    if (g.min_degree() >= 3) boundary();
    StepResult s = reduce_step(g, rng);
    actions.push_back(std::move(s.action));
    if (s.correction) actions.push_back(std::move(*s.correction));
    if (opts.debug_checks) g.check_invariants();
  }
  boundary();
  return res;
}

// ---------------------------------------------------------------------------
// Replay

namespace detail {

inline void expect(bool ok, const char* what) {
  if (!ok) throw Error(Errc::InconsistentLog, what);
}

inline std::vector<EdgeRecord> sorted(std::vector<EdgeRecord> v) {
  std::sort(v.begin(), v.end(), [](const EdgeRecord& x, const EdgeRecord& y) { return x.edge < y.edge; });
  return v;
}

}  // namespace detail

/// Re-applies a recorded action without randomness, checking that the graph
/// is in the state the record describes.
inline void apply_action(MultiGraph& g, const Action& action) {
  using detail::expect;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, VertexZero>) {
          expect(g.has_vertex(a.v) && g.degree(a.v) == 0, "vertex-0 removal of a non-isolated vertex");
          g.remove_vertex(a.v);
        } else if constexpr (std::is_same_v<T, VertexOne>) {
          expect(g.has_vertex(a.v) && g.has_edge(a.matched_edge) && g.other_end(a.matched_edge, a.v) == a.w,
                 "pendant edge mismatch");
          expect(g.degree(a.v) == 1 || (g.degree(a.v) == 2 && g.multiplicity(a.v, a.w) == 2),
                 "pendant vertex has more than one neighbor");
          std::vector<EdgeRecord> removed = detail::remove_all_edges(g, a.w);
          auto rest = detail::remove_all_edges(g, a.v);
          removed.insert(removed.end(), rest.begin(), rest.end());
          expect(detail::sorted(removed) == detail::sorted(a.removed_edges), "removed edge set mismatch");
          g.remove_vertex(a.v);
          g.remove_vertex(a.w);
        } else if constexpr (std::is_same_v<T, Contraction>) {
          expect(g.has_vertex(a.contracted) && g.degree(a.contracted) == 2, "contracted vertex without degree 2");
          std::vector<VertexId> set{a.contracted};
          set.insert(set.end(), a.neighbors.begin(), a.neighbors.end());
          ContractResult r = g.contract_set(set);
          expect(r.merged == a.new_vertex && r.dropped == a.dropped && r.absorbed == a.absorbed,
                 "contraction result mismatch");
        } else if constexpr (std::is_same_v<T, MaxEdgeRemoval>) {
          expect(g.has_edge(a.edge), "max-edge removal of a missing edge");
          auto [x, y] = g.endpoints(a.edge);
          expect((x == a.v && y == a.u) || (x == a.u && y == a.v), "max-edge endpoints mismatch");
          expect(g.degree(a.v) == a.deg_v_before && g.degree(a.u) == a.deg_u_before, "max-edge degrees mismatch");
          g.remove_edge(a.edge);
        } else {
          const std::array<VertexId, 3> set{a.u, a.v, a.w};
          ContractResult r = g.contract_set(set);
          expect(r.merged == a.new_vertex && r.dropped == a.dropped && r.absorbed == a.absorbed,
                 "auto correction result mismatch");
        }
      },
      action);
}

/// Applies `actions` in order to `g`.
inline void replay(MultiGraph& g, std::span<const Action> actions) {
  for (const Action& a : actions) apply_action(g, a);
}

}  // namespace rcm
