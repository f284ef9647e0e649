#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rcmatch/error.hpp"
#include "rcmatch/rng.hpp"

namespace rcm {

/// Vertex handle. Never reused within one graph lifetime.
struct VertexId {
  std::uint32_t value = std::numeric_limits<std::uint32_t>::max();
  constexpr auto operator<=>(const VertexId&) const = default;
  constexpr bool valid() const { return value != std::numeric_limits<std::uint32_t>::max(); }
};

/// Edge handle. Assigned at creation and kept when contractions re-point an endpoint.
struct EdgeId {
  std::uint32_t value = std::numeric_limits<std::uint32_t>::max();
  constexpr auto operator<=>(const EdgeId&) const = default;
  constexpr bool valid() const { return value != std::numeric_limits<std::uint32_t>::max(); }
};

inline constexpr VertexId kNoVertex{};
inline constexpr EdgeId kNoEdge{};

/// An edge together with its endpoints at some moment.
struct EdgeRecord {
  EdgeId edge;
  VertexId a;
  VertexId b;
  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

/// An edge re-pointed by a contraction, with the endpoint it had before.
struct Absorbed {
  EdgeId edge;
  VertexId former;
  friend bool operator==(const Absorbed&, const Absorbed&) = default;
};

struct ContractResult {
  VertexId merged;
  std::size_t internal_dropped = 0;
  std::vector<EdgeRecord> dropped;  ///< edges with both endpoints inside the set
  std::vector<Absorbed> absorbed;   ///< edges re-pointed at `merged`
};

/// Mutable loop-free multigraph with exact degree buckets.
///
/// Vertices and edges live in id-indexed slots. Each vertex keeps its
/// incidence multiset as a vector of EdgeIds and each edge remembers its
/// position in both endpoint vectors, so removals are swap-removes. The
/// degree buckets use the same trick, which makes uniform sampling from a
/// bucket and every degree update O(1).
class MultiGraph {
 public:
  MultiGraph() = default;

  /// Graph with vertices 0..n-1 and no edges.
  explicit MultiGraph(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) add_vertex();
  }

  VertexId add_vertex() {
    VertexId id{static_cast<std::uint32_t>(vertices_.size())};
    vertices_.push_back(VertexSlot{});
    vertices_.back().alive = true;
    bucket_insert(id, 0);
    ++live_vertices_;
    return id;
  }

  EdgeId add_edge(VertexId u, VertexId v) {
    require_vertex(u);
    require_vertex(v);
    if (u == v) throw Error(Errc::LoopRejected, "edge endpoints coincide at vertex " + std::to_string(u.value));
    EdgeId id{static_cast<std::uint32_t>(edges_.size())};
    EdgeSlot slot;
    slot.ends = {u, v};
    slot.origin = {u, v};
    slot.alive = true;
    edges_.push_back(slot);
    attach(id, 0, u);
    attach(id, 1, v);
    ++live_edges_;
    return id;
  }

  void remove_edge(EdgeId e) {
    require_edge(e);
    EdgeSlot& s = edges_[e.value];
    detach(e, 0);
    detach(e, 1);
    s.alive = false;
    --live_edges_;
  }

  void remove_vertex(VertexId v) {
    require_vertex(v);
    if (!vertices_[v.value].incident.empty())
      throw Error(Errc::NonzeroDegree, "vertex " + std::to_string(v.value) + " still has incident edges");
    bucket_erase(v, 0);
    std::vector<EdgeId>().swap(vertices_[v.value].incident);
    vertices_[v.value].alive = false;
    --live_vertices_;
    shrink_max_degree();
  }

  /// Replaces the vertices of `set` by one fresh vertex. Edges with one end in
  /// the set are re-pointed at the new vertex and keep their ids; edges with
  /// both ends in the set are deleted.
  ContractResult contract_set(std::span<const VertexId> set) {
    if (set.size() < 2) throw Error(Errc::SetTooSmall, "contraction needs at least two vertices");
    if (++stamp_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0u);
      stamp_ = 1;
    }
    if (mark_.size() < vertices_.size() + 1) mark_.resize(vertices_.size() + 1, 0u);
    for (VertexId s : set) {
      require_vertex(s);
      if (mark_[s.value] == stamp_) throw Error(Errc::UnknownVertex, "vertex listed twice in contraction set");
      mark_[s.value] = stamp_;
    }

    ContractResult out;
    out.merged = add_vertex();
    std::size_t degree_sum = 0;
    for (VertexId s : set) degree_sum += vertices_[s.value].incident.size();
    vertices_[out.merged.value].incident.reserve(degree_sum);
    for (VertexId s : set) {
      // Copy: entries of other set members are erased while we iterate.
      scratch_.assign(vertices_[s.value].incident.begin(), vertices_[s.value].incident.end());
      for (EdgeId e : scratch_) {
        EdgeSlot& es = edges_[e.value];
        if (!es.alive) continue;
        const int side = es.ends[0] == s ? 0 : 1;
        const VertexId other = es.ends[1 - side];
        if (other.valid() && mark_[other.value] == stamp_) {
          out.dropped.push_back(EdgeRecord{e, es.ends[0], es.ends[1]});
          detach(e, 0);
          detach(e, 1);
          es.alive = false;
          --live_edges_;
        } else {
          out.absorbed.push_back(Absorbed{e, s});
          detach(e, side);
          attach(e, side, out.merged);
        }
      }
    }
    for (VertexId s : set) remove_vertex(s);
    out.internal_dropped = out.dropped.size();
    return out;
  }

  bool has_vertex(VertexId v) const {
    return v.valid() && v.value < vertices_.size() && vertices_[v.value].alive;
  }
  bool has_edge(EdgeId e) const { return e.valid() && e.value < edges_.size() && edges_[e.value].alive; }

  std::size_t degree(VertexId v) const {
    require_vertex(v);
    return vertices_[v.value].incident.size();
  }

  std::span<const EdgeId> incident(VertexId v) const {
    require_vertex(v);
    return vertices_[v.value].incident;
  }

  std::pair<VertexId, VertexId> endpoints(EdgeId e) const {
    require_edge(e);
    return {edges_[e.value].ends[0], edges_[e.value].ends[1]};
  }

  /// Endpoints at creation time; valid for removed edges too.
  std::pair<VertexId, VertexId> origin(EdgeId e) const {
    if (!e.valid() || e.value >= edges_.size()) throw Error(Errc::UnknownEdge, "edge " + std::to_string(e.value));
    return {edges_[e.value].origin[0], edges_[e.value].origin[1]};
  }

  VertexId other_end(EdgeId e, VertexId v) const {
    auto [a, b] = endpoints(e);
    if (a == v) return b;
    if (b == v) return a;
    throw Error(Errc::UnknownVertex, "vertex is not an endpoint of the edge");
  }

  std::size_t num_vertices() const { return live_vertices_; }
  std::size_t num_edges() const { return live_edges_; }
  bool empty() const { return live_vertices_ == 0; }

  /// One past the largest VertexId ever issued.
  std::size_t vertex_capacity() const { return vertices_.size(); }
  /// One past the largest EdgeId ever issued.
  std::size_t edge_capacity() const { return edges_.size(); }

  std::size_t max_degree() const { return live_vertices_ == 0 ? 0 : max_degree_; }

  std::size_t min_degree() const {
    if (live_vertices_ == 0) return 0;
    for (std::size_t d = 0; d < buckets_.size(); ++d)
      if (!buckets_[d].empty()) return d;
    return 0;
  }

  /// Vertices of degree d, in unspecified order.
  std::span<const VertexId> bucket(std::size_t d) const {
    if (d >= buckets_.size()) return {};
    return buckets_[d];
  }

  std::size_t count_with_degree(std::size_t d) const { return d < buckets_.size() ? buckets_[d].size() : 0; }

  VertexId random_vertex_with_degree(std::size_t d, Rng& rng) const {
    if (count_with_degree(d) == 0) throw Error(Errc::EmptyBucket, "no vertex of degree " + std::to_string(d));
    const auto& b = buckets_[d];
    return b[rng.index(b.size())];
  }

  VertexId random_max_degree_vertex(Rng& rng) const {
    if (live_vertices_ == 0) throw Error(Errc::EmptyGraph, "graph has no vertices");
    return random_vertex_with_degree(max_degree_, rng);
  }

  /// Uniform over the incidence multiset, so parallel edges weigh by multiplicity.
  EdgeId random_incident_edge(VertexId v, Rng& rng) const {
    const auto inc = incident(v);
    if (inc.empty()) throw Error(Errc::IsolatedVertex, "vertex " + std::to_string(v.value) + " has no edges");
    return inc[rng.index(inc.size())];
  }

  /// n_d indexed by degree d, sized max_degree()+1 (empty for the empty graph).
  std::vector<std::size_t> degree_histogram() const {
    std::vector<std::size_t> h;
    if (live_vertices_ == 0) return h;
    h.resize(max_degree_ + 1);
    for (std::size_t d = 0; d <= max_degree_; ++d) h[d] = buckets_[d].size();
    return h;
  }

  /// Sum over vertices of max(d(v) - ell, 0).
  std::size_t excess(std::size_t ell) const {
    std::size_t ex = 0;
    for (std::size_t d = ell + 1; d <= max_degree() && d < buckets_.size(); ++d) ex += (d - ell) * buckets_[d].size();
    return ex;
  }

  /// Fraction of edge endpoints sitting at degree-j vertices.
  double p_j(std::size_t j) const {
    if (live_edges_ == 0) throw Error(Errc::EmptyGraphForPj, "p_j undefined without edges");
    return static_cast<double>(j * count_with_degree(j)) / static_cast<double>(2 * live_edges_);
  }

  /// Live vertices in increasing id order.
  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    out.reserve(live_vertices_);
    for (std::uint32_t i = 0; i < vertices_.size(); ++i)
      if (vertices_[i].alive) out.push_back(VertexId{i});
    return out;
  }

  /// Live edges in increasing id order.
  std::vector<EdgeId> edges() const {
    std::vector<EdgeId> out;
    out.reserve(live_edges_);
    for (std::uint32_t i = 0; i < edges_.size(); ++i)
      if (edges_[i].alive) out.push_back(EdgeId{i});
    return out;
  }

  /// Number of live edges joining u and v.
  std::size_t multiplicity(VertexId u, VertexId v) const {
    std::size_t m = 0;
    for (EdgeId e : incident(u)) m += other_end(e, u) == v ? 1 : 0;
    return m;
  }

  /// True when there is at most one edge between every pair of vertices.
  bool is_simple() const {
    std::vector<std::uint32_t> seen(vertices_.size(), std::numeric_limits<std::uint32_t>::max());
    for (std::uint32_t i = 0; i < vertices_.size(); ++i) {
      if (!vertices_[i].alive) continue;
      for (EdgeId e : vertices_[i].incident) {
        VertexId o = other_end(e, VertexId{i});
        if (seen[o.value] == i) return false;
        seen[o.value] = i;
      }
    }
    return true;
  }

  /// Full recomputation of every structural invariant; throws on the first
  /// violation. O(|V| + |E|).
  void check_invariants() const {
    std::size_t deg_sum = 0, live_v = 0, live_e = 0, max_d = 0;
    for (std::uint32_t i = 0; i < vertices_.size(); ++i) {
      const VertexSlot& s = vertices_[i];
      if (!s.alive) {
        if (!s.incident.empty()) fail("dead vertex keeps incidences");
        continue;
      }
      ++live_v;
      const std::size_t d = s.incident.size();
      deg_sum += d;
      max_d = std::max(max_d, d);
      if (d >= buckets_.size() || s.bucket_pos >= buckets_[d].size() || buckets_[d][s.bucket_pos] != VertexId{i})
        fail("degree bucket out of sync");
      for (std::uint32_t p = 0; p < d; ++p) {
        const EdgeSlot& es = edges_[s.incident[p].value];
        if (!es.alive) fail("incidence lists a dead edge");
        const bool at0 = es.ends[0] == VertexId{i} && es.pos[0] == p;
        const bool at1 = es.ends[1] == VertexId{i} && es.pos[1] == p;
        if (!at0 && !at1) fail("edge position index out of sync");
      }
    }
    for (const EdgeSlot& es : edges_) {
      if (!es.alive) continue;
      ++live_e;
      if (es.ends[0] == es.ends[1]) fail("loop present");
    }
    std::size_t bucket_total = 0;
    for (const auto& b : buckets_) bucket_total += b.size();
    if (bucket_total != live_v) fail("buckets do not partition live vertices");
    if (live_v != live_vertices_ || live_e != live_edges_) fail("live counters out of sync");
    if (deg_sum != 2 * live_e) fail("degree sum differs from twice the edge count");
    if (live_v > 0 && max_d != max_degree_) fail("max degree pointer out of sync");
  }

 private:
  struct VertexSlot {
    std::vector<EdgeId> incident;
    std::uint32_t bucket_pos = 0;
    bool alive = false;
  };
  struct EdgeSlot {
    std::array<VertexId, 2> ends{};
    std::array<std::uint32_t, 2> pos{};
    std::array<VertexId, 2> origin{};
    bool alive = false;
  };

  [[noreturn]] static void fail(const char* what) { throw Error(Errc::InconsistentLog, std::string("graph invariant: ") + what); }

  void require_vertex(VertexId v) const {
    if (!has_vertex(v)) throw Error(Errc::UnknownVertex, "vertex " + std::to_string(v.value));
  }
  void require_edge(EdgeId e) const {
    if (!has_edge(e)) throw Error(Errc::UnknownEdge, "edge " + std::to_string(e.value));
  }

  void attach(EdgeId e, int side, VertexId v) {
    VertexSlot& vs = vertices_[v.value];
    const std::size_t d = vs.incident.size();
    edges_[e.value].ends[side] = v;
    edges_[e.value].pos[side] = static_cast<std::uint32_t>(d);
    vs.incident.push_back(e);
    bucket_move(v, d, d + 1);
  }

  void detach(EdgeId e, int side) {
    EdgeSlot& es = edges_[e.value];
    const VertexId v = es.ends[side];
    VertexSlot& vs = vertices_[v.value];
    const std::uint32_t p = es.pos[side];
    const std::size_t d = vs.incident.size();
    const EdgeId last = vs.incident.back();
    vs.incident[p] = last;
    EdgeSlot& ls = edges_[last.value];
    // `last` may be e itself, or a parallel edge whose other side also sits here.
    if (ls.ends[0] == v && ls.pos[0] == d - 1)
      ls.pos[0] = p;
    else
      ls.pos[1] = p;
    vs.incident.pop_back();
    es.ends[side] = kNoVertex;
    bucket_move(v, d, d - 1);
  }

  void bucket_insert(VertexId v, std::size_t d) {
    if (buckets_.size() <= d) buckets_.resize(d + 1);
    vertices_[v.value].bucket_pos = static_cast<std::uint32_t>(buckets_[d].size());
    buckets_[d].push_back(v);
    max_degree_ = std::max(max_degree_, d);
  }

  void bucket_erase(VertexId v, std::size_t d) {
    auto& b = buckets_[d];
    const std::uint32_t p = vertices_[v.value].bucket_pos;
    const VertexId last = b.back();
    b[p] = last;
    vertices_[last.value].bucket_pos = p;
    b.pop_back();
  }

  void bucket_move(VertexId v, std::size_t from, std::size_t to) {
    bucket_erase(v, from);
    bucket_insert(v, to);
    if (to < from) shrink_max_degree();
  }

  void shrink_max_degree() {
    while (max_degree_ > 0 && buckets_[max_degree_].empty()) --max_degree_;
  }

  std::vector<VertexSlot> vertices_;
  std::vector<EdgeSlot> edges_;
  std::vector<std::vector<VertexId>> buckets_;
  std::vector<EdgeId> scratch_;
  std::size_t live_vertices_ = 0;
  std::size_t live_edges_ = 0;
  std::size_t max_degree_ = 0;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
};

/// Writes `# vertices=N edges=M` followed by one `u v` line per live edge.
/// Live vertices are relabeled 0..N-1 in id order.
inline void write_edge_list(std::ostream& os, const MultiGraph& g) {
  std::vector<std::uint32_t> label(g.vertex_capacity(), 0);
  std::uint32_t next = 0;
  for (VertexId v : g.vertices()) label[v.value] = next++;
  os << "# vertices=" << g.num_vertices() << " edges=" << g.num_edges() << '\n';
  for (EdgeId e : g.edges()) {
    auto [a, b] = g.endpoints(e);
    os << label[a.value] << ' ' << label[b.value] << '\n';
  }
}

/// Parses the edge-list format. Edge ids follow line order; vertex ids are the labels.
inline MultiGraph read_edge_list(std::istream& is) {
  std::string line;
  std::size_t declared_vertices = 0, declared_edges = 0;
  bool have_header = false;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      const auto vp = line.find("vertices=");
      const auto ep = line.find("edges=");
      if (vp != std::string::npos && ep != std::string::npos) {
        try {
          declared_vertices = std::stoull(line.substr(vp + 9));
          declared_edges = std::stoull(line.substr(ep + 6));
        } catch (const std::exception&) {
          throw Error(Errc::ParseError, "bad header on line " + std::to_string(line_no));
        }
        have_header = true;
      }
      continue;
    }
    std::istringstream ls(line);
    long long u = -1, v = -1;
    std::string rest;
    if (!(ls >> u >> v) || (ls >> rest) || u < 0 || v < 0)
      throw Error(Errc::ParseError, "expected `u v` on line " + std::to_string(line_no));
    pairs.emplace_back(static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(v));
  }
  std::size_t n = declared_vertices;
  for (auto [u, v] : pairs) n = std::max<std::size_t>(n, std::max(u, v) + 1);
  if (have_header && n != declared_vertices)
    throw Error(Errc::ParseError, "edge endpoint exceeds declared vertex count");
  if (have_header && pairs.size() != declared_edges)
    throw Error(Errc::ParseError, "declared " + std::to_string(declared_edges) + " edges, found " +
                                      std::to_string(pairs.size()));
  MultiGraph g(n);
  for (auto [u, v] : pairs) {
    if (u == v) throw Error(Errc::LoopRejected, "loop at vertex " + std::to_string(u));
    g.add_edge(VertexId{static_cast<std::uint32_t>(u)}, VertexId{static_cast<std::uint32_t>(v)});
  }
  return g;
}

}  // namespace rcm
