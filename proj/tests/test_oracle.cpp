#include <gtest/gtest.h>

#include "rcmatch/construct.hpp"
#include "rcmatch/oracle.hpp"
#include "support/graphs.hpp"

using namespace rcm;

TEST(MaxMatchingExact, SmallGraphs) {
  EXPECT_EQ(max_matching_exact(rcm::testing::cycle(5)).size(), 2u);
  EXPECT_EQ(max_matching_exact(rcm::testing::complete(4)).size(), 2u);
  EXPECT_EQ(max_matching_exact(rcm::testing::petersen()).size(), 5u);
  EXPECT_EQ(max_matching_exact(rcm::testing::cube()).size(), 4u);
  EXPECT_EQ(max_matching_exact(MultiGraph{}).size(), 0u);
}

TEST(MaxMatchingExact, OutputIsValid) {
  Rng rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const MultiGraph g = rcm::testing::random_multigraph(40, 60, rng);
    EXPECT_TRUE(validate_matching(max_matching_exact(g), g).valid);
  }
}

TEST(MaxMatchingExact, ParallelEdgesReportSmallestId) {
  const MultiGraph g = rcm::testing::from_edges(2, {{0, 1}, {1, 0}, {0, 1}});
  EXPECT_EQ(max_matching_exact(g).edges, (std::vector<EdgeId>{EdgeId{0}}));
}

TEST(BruteForce, SmallGraphs) {
  EXPECT_EQ(brute_force_matching(rcm::testing::from_edges(2, {{0, 1}})), 1u);
  EXPECT_EQ(brute_force_matching(rcm::testing::cycle(3)), 1u);
  EXPECT_EQ(brute_force_matching(rcm::testing::cube()), 4u);
  EXPECT_EQ(brute_force_matching(rcm::testing::petersen()), 5u);
}

TEST(BruteForce, TooLarge) {
  try {
    brute_force_matching(rcm::testing::cycle(17));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TooLarge);
  }
}

TEST(BlossomVersusBruteForce, RandomMultigraphs) {
  Rng rng(31337);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng.index(10);
    const MultiGraph g = rcm::testing::random_multigraph(n, rng.index(3 * n + 1), rng);
    ASSERT_EQ(max_matching_exact(g).size(), brute_force_matching(g)) << "rep " << rep;
  }
}

TEST(MatchWithFallback, EmptyGraph) {
  Rng rng(1);
  const FallbackResult r = match_with_fallback(MultiGraph{}, rng);
  EXPECT_EQ(r.matching.size(), 0u);
  EXPECT_FALSE(r.used_fallback);
}

TEST(MatchWithFallback, NeverWorseThanReduceConstruct) {
  Rng gen(8);
  std::size_t used = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 6 + gen.index(40);
    const MultiGraph g = rcm::testing::random_multigraph(n, n + gen.index(n), gen);
    Rng rng(rep);
    const FallbackResult r = match_with_fallback(g, rng);
    ASSERT_TRUE(validate_matching(r.matching, g).valid);
    ASSERT_GE(r.matching.size(), r.reduce_construct_size);
    ASSERT_EQ(r.matching.size(), r.used_fallback ? max_matching_exact(g).size() : n / 2);
    used += r.used_fallback;
  }
  EXPECT_GT(used, 0u);
}

TEST(MatchWithFallback, RegularInputsRarelyFallBack) {
  std::size_t used = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(3, seed));
    const MultiGraph g = sample_configuration(regular_sequence(1000, 3), rng);
    const FallbackResult r = match_with_fallback(g, rng);
    EXPECT_EQ(r.matching.size(), 500u);
    used += r.used_fallback;
  }
  EXPECT_LE(used, 10u);
}
