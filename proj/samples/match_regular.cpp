// Samples a random 4-regular multigraph, matches it with Reduce-Construct and
// checks the result against the exact matching.

#include <iostream>

#include "rcmatch/rcmatch.hpp"

int main() {
  rcm::Rng rng(2024);
  const rcm::MultiGraph g = rcm::sample_configuration(rcm::regular_sequence(2000, 4), rng);

  const rcm::PipelineResult res = rcm::reduce_construct(g, rng);
  const rcm::MatchingCheck check = rcm::validate_matching(res.matching, g);
  const std::size_t best = rcm::max_matching_exact(g).size();

  std::cout << "vertices " << g.num_vertices() << ", edges " << g.num_edges() << '\n'
            << "reduce-construct matched " << check.size << " edges"
            << (check.perfect ? " (perfect)" : "") << ", exact maximum " << best << '\n';

  const rcm::KindCounts kinds = rcm::kind_counts(res.reduce.log);
  for (std::size_t i = 0; i < rcm::kHyperKindCount; ++i)
    if (kinds[i] != 0) std::cout << "  " << rcm::to_string(static_cast<rcm::HyperKind>(i)) << ' ' << kinds[i] << '\n';
  return check.valid ? 0 : 1;
}
