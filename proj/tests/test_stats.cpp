#include <gtest/gtest.h>

#include <cmath>

#include "rcmatch/construct.hpp"
#include "rcmatch/stats.hpp"
#include "support/traces.hpp"

using namespace rcm;
using rcm::testing::record;

TEST(P3Bound, ClosedForm) {
  double s = 0.0;
  for (int j = 3; j <= 7; ++j) s += std::pow(1.17, j - 3) * j;
  EXPECT_NEAR(p3_bound(8), 3.0 / s, 1e-12);
  EXPECT_LE(p3_bound(8), kP3Anchor);
  EXPECT_GT(p3_bound(8, true), kP3Anchor);
  EXPECT_LT(p3_bound(10), p3_bound(8));
}

TEST(Predictions, EdgeDrift) {
  const TraceRecord r = record({0, 0, 0, 0, 0, 0, 0, 0, 100}, HyperKind::Initial, 8, 100);
  EXPECT_DOUBLE_EQ(predict_edge_drift(r), -1.0);
  const TraceRecord q = record({0, 0, 0, 40, 30}, HyperKind::Initial, 4, 70);
  EXPECT_DOUBLE_EQ(predict_edge_drift(q), -1.0 - 2.0 * 120.0 / 240.0);
}

TEST(Predictions, VertexDriftRegularStart) {
  // Regular start: the removed edge takes one top vertex and one uniform
  // endpoint, also top degree, down one class.
  const TraceRecord r = record({0, 0, 0, 0, 0, 0, 0, 0, 1000}, HyperKind::Initial, 8, 1000);
  EXPECT_DOUBLE_EQ(predict_vertex_drift(r, 8), -2.0);
  EXPECT_DOUBLE_EQ(predict_vertex_drift(r, 7), 2.0);
  EXPECT_DOUBLE_EQ(predict_vertex_drift(r, 5), 0.0);
}

TEST(Predictions, VertexDriftMergeTerm) {
  // n_3 = n_4 = 10: p_3 = 30/70, p_4 = 40/70. Degree 5 arises from merging
  // a degree-3 and degree-4 neighbor (3+4-2) in either order.
  const TraceRecord r = record({0, 0, 0, 10, 10}, HyperKind::Initial, 4, 20);
  const double p3 = 30.0 / 70.0, p4 = 40.0 / 70.0;
  EXPECT_NEAR(predict_vertex_drift(r, 5), p3 * (2 * p3 * p4), 1e-12);
  EXPECT_NEAR(predict_vertex_drift(r, 4), p3 * (p3 * p3 - 2 * p4) - p4 - 1.0, 1e-12);
}

TEST(StoppingTimes, TauAndT) {
  std::vector<TraceRecord> trace = rcm::testing::t1_trace(1000, 8, 400);
  trace.push_back(record({}, HyperKind::T1, 8, 1000));
  // Delta stays 8 and e_i above n^0.9 until the final empty record.
  EXPECT_EQ(tau(trace, 7, 1000), trace.size() - 1);
  EXPECT_EQ(t_exit(trace, 7, 1000, true), trace.size() - 1);
  // Strict C_{3,8} fails once n_8 < 1.17 n_7, i.e. after step 230.
  EXPECT_EQ(t_exit(trace, 8, 1000, true), 231u);
  const StoppingReport s = stopping_report(trace, 8, 1000, true);
  for (std::size_t j = 4; j <= 8; ++j) EXPECT_LE(s.tau[j], s.tau[j - 1]);
  EXPECT_EQ(s.n_k0, 1000u);
  EXPECT_EQ(s.e_at_tau[7], trace[s.tau[7]].edges);
}

TEST(Drift, SyntheticT1Trace) {
  const auto trace = rcm::testing::t1_trace(100000, 8, 1200);
  const DriftReport r = drift_report(trace, 8, 100000);
  ASSERT_EQ(r.windows.size(), 1u);
  EXPECT_DOUBLE_EQ(r.windows[0].mean_de, -1.0);
  EXPECT_DOUBLE_EQ(r.windows[0].pred_de, -1.0);
  EXPECT_TRUE(r.edge_ok);
  EXPECT_NEAR(r.windows[0].mean_dn[8], -2.0, 1e-12);
  EXPECT_NEAR(r.windows[0].pred_dn[8], -2.0, 0.02);
  EXPECT_EQ(r.windows[0].t3_freq, 0.0);
  EXPECT_TRUE(r.kinds_ok);
}

TEST(Drift, DetectsWrongEdgeDrift) {
  auto trace = rcm::testing::t1_trace(100000, 8, 1200);
  // Pretend every step removed two edges.
  for (std::size_t i = 0; i < trace.size(); ++i) trace[i].edges = 400000 - 2 * i;
  EXPECT_FALSE(drift_report(trace, 8, 100000).edge_ok);
}

TEST(Drift, TraceTooShort) {
  const auto trace = rcm::testing::t1_trace(1000, 8, 100);
  try {
    drift_report(trace, 8, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TraceTooShort);
  }
}

TEST(RemA, RegularTracePasses) {
  const auto trace = rcm::testing::t1_trace(100000, 8, 50);
  const RemAReport r = remA_check(trace, 8, 100000);
  EXPECT_TRUE(r.applicable);
  EXPECT_EQ(r.checked, trace.size());
  EXPECT_TRUE(r.pass());
}

TEST(RemA, NonDominantIsSkipped) {
  const std::vector<TraceRecord> trace{record({0, 0, 0, 100000}, HyperKind::Initial, 8, 100000)};
  const RemAReport r = remA_check(trace, 8, 100000);
  EXPECT_EQ(r.checked, 0u);
  EXPECT_TRUE(r.pass());
}

TEST(RemA, ViolationWhenSlackAdmitsDegreeThree) {
  // At n0 = 10^6 the slack term admits a pure degree-3 histogram.
  const std::vector<TraceRecord> trace{record({0, 0, 0, 200000}, HyperKind::Initial, 8, 1000000)};
  const RemAReport r = remA_check(trace, 8, 1000000, 0.005, false);
  EXPECT_EQ(r.checked, 1u);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_DOUBLE_EQ(r.violations[0].p3, 1.0);
}

TEST(Excess, RegularStartIsZero) {
  const auto trace = rcm::testing::t1_trace(10000, 5, 10);
  const ExcessReport r = excess_monitor(trace, 5, 10000);
  EXPECT_EQ(trace[0].ex(5), 0u);
  EXPECT_EQ(r.max_excess, 0u);
  EXPECT_TRUE(r.pass());
}

TEST(Excess, BadKindClearsGoodness) {
  auto trace = rcm::testing::t1_trace(10000, 5, 10);
  trace[4].kind = HyperKind::T3c;
  const ExcessReport r = excess_monitor(trace, 5, 10000);
  EXPECT_FALSE(r.good);
  EXPECT_EQ(r.bad, 1u);
  EXPECT_EQ(r.first_bad, 3u);
}

TEST(Excess, UnboundedExcess) {
  std::vector<TraceRecord> trace{record({0, 0, 0, 0, 9000, 1000}, HyperKind::Initial, 4, 10000)};
  const ExcessReport r = excess_monitor(trace, 4, 10000);
  EXPECT_EQ(r.max_excess, 1000u);
  EXPECT_FALSE(r.bounded);
}

TEST(Survival, KThree) {
  const auto trace = rcm::testing::t1_trace(100, 3, 1);
  const SurvivalReport r = survival_report(trace, 3, 100);
  EXPECT_FALSE(r.note.empty());
  EXPECT_TRUE(r.pass());
}

TEST(Survival, EightRegularSynthetic) {
  // The top class is used up after 500 steps.
  const auto trace = rcm::testing::t1_trace(1000, 8, 520);
  const SurvivalReport r = survival_report(trace, 8, 1000);
  EXPECT_EQ(r.tau, 500u);
  EXPECT_EQ(r.e_tau, 3500u);
  EXPECT_NEAR(r.ratio, 0.875, 1e-12);
  EXPECT_DOUBLE_EQ(r.edge_factor, 0.5);
  EXPECT_NEAR(r.time_bound, 1500.0 + std::pow(1000.0, 0.6), 1e-9);
  EXPECT_TRUE(r.time_ok);
}

TEST(HardBounds, TopClassRemovalsMoveLowExcessByTwo) {
  // Each step takes two degree-6 vertices to degree 5: e, n_r and ex_5, ex_6
  // stay in bounds, while ex_3 and ex_4 fall by 2 against limits 0 and 1.
  const auto trace = rcm::testing::t1_trace(10000, 6, 100);
  const HardBoundReport r = hard_bounds(trace, 6);
  EXPECT_EQ(r.checked, 100u);
  EXPECT_EQ(r.edge_violations, 0u);
  EXPECT_EQ(r.vertex_violations, 0u);
  EXPECT_EQ(r.excess_by_ell[3], 100u);
  EXPECT_EQ(r.excess_by_ell[4], 100u);
  EXPECT_EQ(r.excess_by_ell[5], 0u);
  EXPECT_EQ(r.excess_by_ell[6], 0u);
  EXPECT_EQ(r.excess_increase_violations, 0u);
  ASSERT_FALSE(r.samples.empty());
  EXPECT_EQ(r.samples[0].change, -2);
}

TEST(HardBounds, FlagsLargeJumps) {
  std::vector<TraceRecord> trace{record({0, 0, 0, 0, 0, 0, 100}, HyperKind::Initial, 6, 100),
                                 record({0, 0, 0, 0, 0, 8, 92}, HyperKind::T3a, 6, 100)};
  trace[1].edges = trace[0].edges - 7;
  const HardBoundReport r = hard_bounds(trace, 6);
  EXPECT_EQ(r.edge_violations, 1u);
  EXPECT_GE(r.vertex_violations, 2u);
  ASSERT_FALSE(r.samples.empty());
  EXPECT_EQ(r.samples[0].quantity, "e");
  EXPECT_FALSE(r.pass());

  trace[1].kind = HyperKind::Bad;
  EXPECT_EQ(hard_bounds(trace, 6).checked, 0u);
}

TEST(KindCounts, FromTraceAndLog) {
  auto trace = rcm::testing::t1_trace(1000, 4, 5);
  trace[2].kind = HyperKind::T3a;
  const KindCounts c = kind_counts(trace);
  EXPECT_EQ(c[static_cast<std::size_t>(HyperKind::Initial)], 1u);
  EXPECT_EQ(c[static_cast<std::size_t>(HyperKind::T1)], 4u);
  EXPECT_EQ(c[static_cast<std::size_t>(HyperKind::T3a)], 1u);

  Rng rng(3);
  const MultiGraph g = sample_configuration(regular_sequence(200, 4), rng);
  const PipelineResult r = reduce_construct(g, rng);
  EXPECT_EQ(kind_counts(r.reduce.log), kind_counts(r.reduce.trace));
}

TEST(Reports, PureFunctionsOfTrace) {
  Rng rng(9);
  const MultiGraph g = sample_configuration(regular_sequence(5000, 8), rng);
  const PipelineResult r = reduce_construct(g, rng);
  const auto& t = r.reduce.trace;
  const DriftReport a = drift_report(t, 8, 5000), b = drift_report(t, 8, 5000);
  ASSERT_EQ(a.windows.size(), b.windows.size());
  for (std::size_t i = 0; i < a.windows.size(); ++i) EXPECT_EQ(a.windows[i].mean_dn, b.windows[i].mean_dn);
  EXPECT_EQ(hard_bounds(t, 8).violations(), hard_bounds(t, 8).violations());
  EXPECT_EQ(remA_check(t, 8, 5000).max_p3, remA_check(t, 8, 5000).max_p3);
}
