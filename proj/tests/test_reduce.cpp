#include <gtest/gtest.h>

#include "rcmatch/genmodel.hpp"
#include "rcmatch/reduce.hpp"
#include "support/graphs.hpp"

using namespace rcm;
using rcm::testing::V;

namespace {

Contraction contraction_with_eta(std::size_t eta) {
  Contraction c;
  c.neighbors = {V(1), V(2)};
  c.internal_dropped = 2 + eta;
  return c;
}

HyperKind kind_of(std::vector<Action> actions) { return classify(actions, false); }

/// v=0 of degree 4 joined to u_i, each u_i doubly joined to w_i, and the
/// w_i paired up. Every max-edge removal at v strands some u_i on w_i.
MultiGraph type2_gadget() {
  MultiGraph g(9);
  for (std::uint32_t i = 0; i < 4; ++i) {
    const VertexId u = V(1 + i), w = V(5 + i);
    g.add_edge(V(0), u);
    g.add_edge(u, w);
    g.add_edge(u, w);
  }
  g.add_edge(V(5), V(6));
  g.add_edge(V(7), V(8));
  return g;
}

}  // namespace

TEST(ReduceStep, EmptyGraphThrows) {
  MultiGraph g;
  Rng rng(1);
  EXPECT_THROW(reduce_step(g, rng), Error);
}

TEST(ReduceStep, IsolatedVertex) {
  MultiGraph g(2);
  Rng rng(1);
  const StepResult s = reduce_step(g, rng);
  EXPECT_TRUE(std::holds_alternative<VertexZero>(s.action));
  EXPECT_EQ(g.num_vertices(), 1u);
}

TEST(ReduceStep, SingleEdge) {
  MultiGraph g(2);
  const EdgeId e = g.add_edge(V(0), V(1));
  Rng rng(1);
  const StepResult s = reduce_step(g, rng);
  const auto& a = std::get<VertexOne>(s.action);
  EXPECT_EQ(a.matched_edge, e);
  EXPECT_EQ(a.removed_edges.size(), 1u);
  EXPECT_TRUE(g.empty());
}

TEST(ReduceStep, PendantRemovesNeighborEdges) {
  // 0 - 1, and 1 joined to a triangle 1-2-3.
  MultiGraph g = rcm::testing::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 1}});
  Rng rng(1);
  const StepResult s = reduce_step(g, rng);
  const auto& a = std::get<VertexOne>(s.action);
  EXPECT_EQ(a.v, V(0));
  EXPECT_EQ(a.w, V(1));
  EXPECT_EQ(a.removed_edges.size(), 3u);
  EXPECT_EQ(g.num_vertices(), 2u);
  EXPECT_EQ(g.num_edges(), 1u);
}

TEST(ReduceStep, DoubleEdgeActsAsPendant) {
  MultiGraph g = rcm::testing::from_edges(2, {{0, 1}, {0, 1}});
  Rng rng(3);
  const StepResult s = reduce_step(g, rng);
  const auto& a = std::get<VertexOne>(s.action);
  EXPECT_EQ(a.removed_edges.size(), 2u);
  EXPECT_TRUE(a.matched_edge == EdgeId{0} || a.matched_edge == EdgeId{1});
  EXPECT_TRUE(g.empty());
}

TEST(ReduceStep, DegreeTwoContraction) {
  MultiGraph g = rcm::testing::cycle(4);
  Rng rng(1);
  const StepResult s = reduce_step(g, rng);
  const auto& c = std::get<Contraction>(s.action);
  EXPECT_EQ(c.neighbors.size(), 2u);
  EXPECT_EQ(c.internal_dropped, 2u);
  EXPECT_EQ(c.eta(), 0u);
  EXPECT_EQ(g.num_vertices(), 2u);
  EXPECT_EQ(g.degree(c.new_vertex), 2u);
}

TEST(ReduceStep, AutoCorrectionAfterMaxEdgeRemoval) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MultiGraph g = type2_gadget();
    Rng rng(seed);
    const StepResult s = reduce_step(g, rng);
    const auto& m = std::get<MaxEdgeRemoval>(s.action);
    EXPECT_EQ(m.v, V(0));
    EXPECT_EQ(m.deg_v_before, 4u);
    ASSERT_TRUE(s.correction.has_value());
    const auto& ac = std::get<AutoCorrection>(*s.correction);
    EXPECT_EQ(ac.u, m.u);
    EXPECT_EQ(ac.v, V(0));
    EXPECT_EQ(ac.w.value, m.u.value + 4);
    // u-w pair dropped; v keeps 3 edges, w keeps 1.
    EXPECT_EQ(ac.internal_dropped, 2u);
    EXPECT_EQ(g.degree(ac.new_vertex), 4u);
    const std::vector<Action> hyper{s.action, *s.correction};
    EXPECT_EQ(kind_of(hyper), HyperKind::T2);
  }
}

TEST(Classify, Kinds) {
  const Action mer = MaxEdgeRemoval{};
  EXPECT_EQ(kind_of({mer}), HyperKind::T1);
  EXPECT_EQ(kind_of({mer, AutoCorrection{}}), HyperKind::T2);
  EXPECT_EQ(kind_of({mer, contraction_with_eta(0)}), HyperKind::T3a);
  EXPECT_EQ(kind_of({mer, contraction_with_eta(1)}), HyperKind::T3b);
  EXPECT_EQ(kind_of({mer, contraction_with_eta(2)}), HyperKind::T3c);
  EXPECT_EQ(kind_of({mer, contraction_with_eta(0), contraction_with_eta(0)}), HyperKind::T4);
  EXPECT_EQ(kind_of({mer, contraction_with_eta(1), contraction_with_eta(0)}), HyperKind::T4);
  EXPECT_EQ(kind_of({mer, contraction_with_eta(1), contraction_with_eta(1)}), HyperKind::Bad);
  EXPECT_EQ(kind_of({mer, contraction_with_eta(0), contraction_with_eta(0), contraction_with_eta(0)}), HyperKind::Bad);
  EXPECT_EQ(kind_of({mer, VertexZero{}}), HyperKind::Bad);
  EXPECT_EQ(kind_of({mer, VertexOne{}}), HyperKind::Bad);
  EXPECT_TRUE(is_good(HyperKind::T3b));
  EXPECT_FALSE(is_good(HyperKind::T3c));
  EXPECT_FALSE(is_good(HyperKind::Bad));
}

TEST(Classify, PairContractionIsBad) {
  Contraction pair;
  pair.neighbors = {V(1)};
  pair.internal_dropped = 2;
  EXPECT_EQ(kind_of({MaxEdgeRemoval{}, pair}), HyperKind::Bad);
}

TEST(Classify, MalformedLogs) {
  EXPECT_THROW(kind_of({VertexZero{}}), Error);
  EXPECT_THROW(kind_of({}), Error);
  const std::vector<Action> stray{VertexZero{}, AutoCorrection{}};
  EXPECT_THROW(group_and_classify(stray), Error);
}

TEST(GroupAndClassify, InitialPrefixThenHyperactions) {
  const std::vector<Action> log{VertexZero{}, contraction_with_eta(0), MaxEdgeRemoval{}, MaxEdgeRemoval{},
                                contraction_with_eta(1), MaxEdgeRemoval{}, AutoCorrection{}};
  const auto h = group_and_classify(log);
  ASSERT_EQ(h.size(), 4u);
  EXPECT_EQ(h[0].kind, HyperKind::Initial);
  EXPECT_EQ(h[0].end, 2u);
  EXPECT_EQ(h[1].kind, HyperKind::T1);
  EXPECT_EQ(h[2].kind, HyperKind::T3b);
  EXPECT_EQ(h[3].kind, HyperKind::T2);
  EXPECT_EQ(h[3].index, 3u);
}

TEST(RunReduce, EmptyInput) {
  MultiGraph g;
  Rng rng(1);
  const ReduceResult r = run_reduce(g, rng);
  EXPECT_TRUE(r.log.actions.empty());
}

TEST(RunReduce, K4) {
  MultiGraph g = rcm::testing::complete(4);
  Rng rng(1);
  const ReduceResult r = run_reduce(g, rng);
  EXPECT_GE(r.log.actions.size(), 1u);
  EXPECT_TRUE(g.empty());
  ASSERT_GE(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0].kind, HyperKind::Initial);
  EXPECT_EQ(r.trace[0].edges, 6u);
  EXPECT_EQ(r.log.boundaries.front(), 0u);
  EXPECT_EQ(r.log.boundaries.back(), r.log.actions.size());
}

class RandomRuns : public ::testing::TestWithParam<std::size_t> {};

TEST_P(RandomRuns, TraceAndLogProperties) {
  const std::size_t k = GetParam();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(100 + k, seed));
    const MultiGraph g0 = sample_configuration(regular_sequence(400, k), rng);
    MultiGraph g = g0;
    ReduceOptions opts;
    opts.debug_checks = true;
    const ReduceResult r = run_reduce(g, rng, opts);
    ASSERT_TRUE(g.empty());
    ASSERT_EQ(r.trace.size(), r.log.boundaries.size());

    const auto hyper = group_and_classify(r.log.actions);
    // One hyperaction per Gamma_i: the initial prefix leads to Gamma_0.
    ASSERT_EQ(hyper.size(), r.trace.size());
    for (std::size_t i = 0; i < hyper.size(); ++i) {
      EXPECT_EQ(hyper[i].end, r.log.boundaries[i]);
      EXPECT_EQ(hyper[i].kind, r.trace[i].kind);
    }

    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const TraceRecord& t = r.trace[i];
      EXPECT_TRUE(t.min_degree >= 3 || t.vertices == 0);
      std::size_t vertices = 0, degree_sum = 0;
      for (std::size_t d = 0; d < t.hist.size(); ++d) {
        vertices += t.hist[d];
        degree_sum += d * t.hist[d];
      }
      EXPECT_EQ(vertices, t.vertices);
      EXPECT_EQ(degree_sum, 2 * t.edges);
      if (i == 0) continue;
      const long long de = static_cast<long long>(t.edges) - static_cast<long long>(r.trace[i - 1].edges);
      if (t.kind == HyperKind::T1) {
        EXPECT_EQ(de, -1);
      } else if (t.kind == HyperKind::T3a) {
        EXPECT_EQ(de, -3);
      } else if (t.kind == HyperKind::T3b) {
        EXPECT_EQ(de, -4);
      }
    }

    MultiGraph copy = g0;
    replay(copy, r.log.actions);
    EXPECT_TRUE(copy.empty());
  }
}

INSTANTIATE_TEST_SUITE_P(Degrees, RandomRuns, ::testing::Values(3, 4, 5, 8));

TEST(RunReduce, TraceRecordMatchesSnapshot) {
  Rng rng(12);
  const MultiGraph g0 = sample_configuration(regular_sequence(300, 6), rng);
  MultiGraph g = g0;
  Rng run_rng(5);
  const ReduceResult r = run_reduce(g, run_rng);
  // Replay up to a few boundaries and recompute the record fields.
  for (std::size_t b : {std::size_t{0}, std::size_t{10}, r.trace.size() / 2}) {
    MultiGraph h = g0;
    replay(h, std::span<const Action>(r.log.actions).first(r.log.boundaries[b]));
    const TraceRecord& t = r.trace[b];
    EXPECT_EQ(t.edges, h.num_edges());
    EXPECT_EQ(t.max_degree, h.max_degree());
    const auto hist = h.degree_histogram();
    ASSERT_EQ(t.hist.size(), hist.size());
    for (std::size_t d = 0; d < hist.size(); ++d) EXPECT_EQ(t.hist[d], hist[d]);
    for (std::size_t l = 3; l <= 6; ++l) EXPECT_EQ(t.ex(l), h.excess(l));
    EXPECT_DOUBLE_EQ(t.p(3), h.p_j(3));
    for (std::size_t l = 4; l <= 6; ++l) {
      EXPECT_EQ(t.dominant(l, true), check_dominance(h, l, 300, true).member);
      EXPECT_EQ(t.dominant(l, false), check_dominance(hist, l, 300, false).member);
    }
  }
}

TEST(RunReduce, Deterministic) {
  Rng a(77), b(77);
  MultiGraph g1 = sample_configuration(regular_sequence(500, 5), a);
  MultiGraph g2 = sample_configuration(regular_sequence(500, 5), b);
  const ReduceResult r1 = run_reduce(g1, a);
  const ReduceResult r2 = run_reduce(g2, b);
  EXPECT_EQ(r1.log.actions, r2.log.actions);
  EXPECT_EQ(r1.log.boundaries, r2.log.boundaries);
}

TEST(Replay, DetectsTampering) {
  Rng rng(3);
  const MultiGraph g0 = sample_configuration(regular_sequence(50, 3), rng);
  MultiGraph g = g0;
  ReduceResult r = run_reduce(g, rng);
  auto it = std::find_if(r.log.actions.begin(), r.log.actions.end(),
                         [](const Action& a) { return std::holds_alternative<MaxEdgeRemoval>(a); });
  ASSERT_NE(it, r.log.actions.end());
  std::get<MaxEdgeRemoval>(*it).deg_v_before += 1;
  MultiGraph h = g0;
  try {
    replay(h, r.log.actions);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InconsistentLog);
  }
}
