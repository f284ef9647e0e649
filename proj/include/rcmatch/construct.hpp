#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "rcmatch/error.hpp"
#include "rcmatch/multigraph.hpp"
#include "rcmatch/reduce.hpp"
#include "rcmatch/rng.hpp"

namespace rcm {

/// Vertex-disjoint set of edges of the original graph.
struct Matching {
  std::vector<EdgeId> edges;       ///< sorted by id
  std::vector<VertexId> covered;   ///< sorted by id

  std::size_t size() const { return edges.size(); }
};

struct MatchingCheck {
  bool valid = true;
  std::size_t size = 0;
  bool perfect = false;
  std::string problem;
};

/// Disjointness and membership against `g0`; perfect means size floor(n/2).
inline MatchingCheck validate_matching(const Matching& m, const MultiGraph& g0) {
  MatchingCheck c;
  c.size = m.edges.size();
  std::vector<char> used(g0.vertex_capacity(), 0);
  for (EdgeId e : m.edges) {
    if (!g0.has_edge(e)) {
      c.valid = false;
      c.problem = "edge " + std::to_string(e.value) + " is not in the graph";
      break;
    }
    auto [a, b] = g0.endpoints(e);
    if (used[a.value] || used[b.value]) {
      c.valid = false;
      c.problem = "edge " + std::to_string(e.value) + " shares an endpoint with another matched edge";
      break;
    }
    used[a.value] = used[b.value] = 1;
  }
  c.perfect = c.valid && c.size == g0.num_vertices() / 2;
  return c;
}

namespace detail {

inline std::size_t vertex_span(const ActionLog& log, const MultiGraph& g0) {
  std::size_t hi = g0.vertex_capacity();
  for (const Action& a : log.actions) {
    if (const auto* c = std::get_if<Contraction>(&a)) hi = std::max<std::size_t>(hi, c->new_vertex.value + 1);
    if (const auto* c = std::get_if<AutoCorrection>(&a)) hi = std::max<std::size_t>(hi, c->new_vertex.value + 1);
  }
  return hi;
}

inline VertexId former_endpoint(std::span<const Absorbed> absorbed, EdgeId e) {
  for (const Absorbed& x : absorbed)
    if (x.edge == e) return x.former;
  throw Error(Errc::InconsistentLog, "matched edge " + std::to_string(e.value) + " was not absorbed by the contraction");
}

/// Uniform choice among the dropped edges joining x and y.
inline EdgeId pick_edge(std::span<const EdgeRecord> dropped, VertexId x, VertexId y, Rng& rng) {
  std::vector<EdgeId> candidates;
  for (const EdgeRecord& r : dropped)
    if ((r.a == x && r.b == y) || (r.a == y && r.b == x)) candidates.push_back(r.edge);
  if (candidates.empty()) throw Error(Errc::InconsistentLog, "no dropped edge joins the vertices to be matched");
  return candidates.size() == 1 ? candidates[0] : candidates[rng.index(candidates.size())];
}

}  // namespace detail

/// Walks the log backwards, expanding every contraction and pendant removal,
/// and returns a matching of the original graph `g0`.
///
/// Invariant: after undoing action t, `mate` is a matching of the graph as it
/// was just before action t, expressed in that graph's vertex ids.
inline Matching unwind(const ActionLog& log, const MultiGraph& g0, Rng& rng) {
  std::vector<EdgeId> mate(detail::vertex_span(log, g0), kNoEdge);
  auto take = [&](VertexId v) {
    const EdgeId e = mate.at(v.value);
    mate[v.value] = kNoEdge;
    return e;
  };
  auto pair_up = [&](VertexId x, VertexId y, EdgeId e) {
    if (mate.at(x.value).valid() || mate.at(y.value).valid())
      throw Error(Errc::InconsistentLog, "expansion would match an already covered vertex");
    mate[x.value] = mate[y.value] = e;
  };

  const auto& actions = log.actions;
  for (std::size_t t = actions.size(); t-- > 0;) {
    const Action& action = actions[t];
    if (const auto* a = std::get_if<VertexOne>(&action)) {
      if (!mate.at(a->w.value).valid() && !mate.at(a->v.value).valid()) pair_up(a->v, a->w, a->matched_edge);
    } else if (const auto* c = std::get_if<Contraction>(&action)) {
      const EdgeId e = take(c->new_vertex);
      VertexId former = kNoVertex;
      if (e.valid()) {
        former = detail::former_endpoint(c->absorbed, e);
        mate.at(former.value) = e;
      }
      if (c->is_pair()) {
        if (!e.valid()) pair_up(c->contracted, c->neighbors[0], detail::pick_edge(c->dropped, c->contracted, c->neighbors[0], rng));
        continue;
      }
      const VertexId a = c->neighbors[0], b = c->neighbors[1];
      VertexId partner;
      if (e.valid()) {
        if (former != a && former != b) throw Error(Errc::InconsistentLog, "absorbed edge came from outside the neighborhood");
        partner = former == a ? b : a;
      } else {
        partner = rng.coin() ? a : b;
      }
      pair_up(c->contracted, partner, detail::pick_edge(c->dropped, c->contracted, partner, rng));
    } else if (const auto* ac = std::get_if<AutoCorrection>(&action)) {
      const auto* removal = t > 0 ? std::get_if<MaxEdgeRemoval>(&actions[t - 1]) : nullptr;
      if (removal == nullptr || removal->u != ac->u || removal->v != ac->v)
        throw Error(Errc::InconsistentLog, "auto correction without its max-edge removal");
      const EdgeId e = take(ac->new_vertex);
      bool use_removed_edge;
      if (e.valid()) {
        const VertexId former = detail::former_endpoint(ac->absorbed, e);
        if (former != ac->v && former != ac->w) throw Error(Errc::InconsistentLog, "absorbed edge came from u");
        mate.at(former.value) = e;
        use_removed_edge = former == ac->w;
      } else {
        use_removed_edge = rng.coin();
      }
      if (use_removed_edge)
        pair_up(ac->u, ac->v, removal->edge);
      else
        pair_up(ac->u, ac->w, detail::pick_edge(ac->dropped, ac->u, ac->w, rng));
    }
    // VertexZero and MaxEdgeRemoval leave the matching unchanged.
  }

  Matching m;
  for (VertexId v : g0.vertices()) {
    const EdgeId e = mate.at(v.value);
    if (!e.valid()) continue;
    m.covered.push_back(v);
    if (!g0.has_edge(e)) throw Error(Errc::InconsistentLog, "matched edge is not in the original graph");
    auto [a, b] = g0.endpoints(e);
    if (mate.at(a.value) != e || mate.at(b.value) != e)
      throw Error(Errc::InconsistentLog, "matched edge does not cover both of its original endpoints");
    if (v == std::min(a, b)) m.edges.push_back(e);
  }
  std::sort(m.edges.begin(), m.edges.end());
  return m;
}

/// Undoes the whole log starting from the empty graph and reports whether
/// the result equals `g0` (same vertex ids, same edge ids and endpoints).
inline bool rewind_matches(const ActionLog& log, const MultiGraph& g0) {
  const std::size_t vspan = detail::vertex_span(log, g0);
  std::vector<char> present(vspan, 0);
  std::vector<EdgeRecord> edges(g0.edge_capacity(), EdgeRecord{});
  auto add_edge = [&](const EdgeRecord& r) {
    if (r.edge.value >= edges.size()) edges.resize(r.edge.value + 1);
    if (edges[r.edge.value].edge.valid()) throw Error(Errc::InconsistentLog, "edge restored twice");
    edges[r.edge.value] = r;
  };
  auto add_vertex = [&](VertexId v) {
    if (present.at(v.value)) throw Error(Errc::InconsistentLog, "vertex restored twice");
    present[v.value] = 1;
  };
  auto expand = [&](VertexId merged, std::span<const VertexId> members, std::span<const Absorbed> absorbed,
                    std::span<const EdgeRecord> dropped) {
    if (!present.at(merged.value)) throw Error(Errc::InconsistentLog, "expanding a vertex that is not present");
    present[merged.value] = 0;
    for (VertexId v : members) add_vertex(v);
    for (const Absorbed& x : absorbed) {
      EdgeRecord& r = edges.at(x.edge.value);
      if (r.a == merged)
        r.a = x.former;
      else if (r.b == merged)
        r.b = x.former;
      else
        throw Error(Errc::InconsistentLog, "absorbed edge is not at the merged vertex");
    }
    for (const EdgeRecord& r : dropped) add_edge(r);
  };

  for (std::size_t t = log.actions.size(); t-- > 0;) {
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, VertexZero>) {
            add_vertex(a.v);
          } else if constexpr (std::is_same_v<T, VertexOne>) {
            add_vertex(a.v);
            add_vertex(a.w);
            for (const EdgeRecord& r : a.removed_edges) add_edge(r);
          } else if constexpr (std::is_same_v<T, Contraction>) {
            std::vector<VertexId> members{a.contracted};
            members.insert(members.end(), a.neighbors.begin(), a.neighbors.end());
            expand(a.new_vertex, members, a.absorbed, a.dropped);
          } else if constexpr (std::is_same_v<T, MaxEdgeRemoval>) {
            add_edge(EdgeRecord{a.edge, a.v, a.u});
          } else {
            const std::array<VertexId, 3> members{a.u, a.v, a.w};
            expand(a.new_vertex, members, a.absorbed, a.dropped);
          }
        },
        log.actions[t]);
  }

  for (std::size_t v = 0; v < vspan; ++v)
    if (static_cast<bool>(present[v]) != g0.has_vertex(VertexId{static_cast<std::uint32_t>(v)})) return false;
  for (std::size_t i = 0; i < std::max(edges.size(), g0.edge_capacity()); ++i) {
    const EdgeId e{static_cast<std::uint32_t>(i)};
    const bool restored = i < edges.size() && edges[i].edge.valid();
    if (restored != g0.has_edge(e)) return false;
    if (!restored) continue;
    auto [a, b] = g0.endpoints(e);
    const EdgeRecord& r = edges[i];
    if (!((r.a == a && r.b == b) || (r.a == b && r.b == a))) return false;
  }
  return true;
}

struct PipelineResult {
  Matching matching;
  ReduceResult reduce;
};

/// Reduce followed by Construct on a copy of `g`.
inline PipelineResult reduce_construct(const MultiGraph& g, Rng& rng, const ReduceOptions& opts = {}) {
  MultiGraph work = g;
  PipelineResult r;
  r.reduce = run_reduce(work, rng, opts);
  r.matching = unwind(r.reduce.log, g, rng);
  return r;
}

/// One line per matched edge: `u v edge_id`, endpoints in original labels.
inline void write_matching(std::ostream& os, const Matching& m, const MultiGraph& g0) {
  for (EdgeId e : m.edges) {
    auto [a, b] = g0.endpoints(e);
    os << a.value << ' ' << b.value << ' ' << e.value << '\n';
  }
}

}  // namespace rcm
