#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <string>
#include <vector>

#include "rcmatch/error.hpp"
#include "rcmatch/multigraph.hpp"
#include "rcmatch/rng.hpp"

namespace rcm {

/// Dominance ratio between consecutive degree classes, 117/100.
inline constexpr std::int64_t kAlphaNum = 117;
inline constexpr std::int64_t kAlphaDen = 100;
inline constexpr double kAlpha = 1.17;

struct DegreeSequence {
  std::vector<std::size_t> degrees;
  std::size_t k_max = 0;

  std::size_t size() const { return degrees.size(); }
  std::size_t total() const { return std::accumulate(degrees.begin(), degrees.end(), std::size_t{0}); }
};

inline void validate(const DegreeSequence& d) {
  if (d.total() % 2 != 0) throw Error(Errc::OddDegreeSum, "degree sum " + std::to_string(d.total()) + " is odd");
  for (std::size_t x : d.degrees)
    if (x > d.k_max)
      throw Error(Errc::InvalidDegreeSequence, "degree " + std::to_string(x) + " exceeds k_max " + std::to_string(d.k_max));
}

inline DegreeSequence regular_sequence(std::size_t n, std::size_t k) {
  if (k < 3) throw Error(Errc::InvalidDegreeSequence, "regular sequences need k >= 3");
  if ((n * k) % 2 != 0)
    throw Error(Errc::OddDegreeSum, std::to_string(n) + "*" + std::to_string(k) + " is odd");
  return DegreeSequence{std::vector<std::size_t>(n, k), k};
}

/// One non-negative integer per line; blank lines and `#` comments skipped.
inline DegreeSequence read_degree_sequence(std::istream& is) {
  DegreeSequence d;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t used = 0;
    long long x = -1;
    try {
      x = std::stoll(line.substr(first), &used);
    } catch (const std::exception&) {
      throw Error(Errc::ParseError, "expected an integer on line " + std::to_string(line_no));
    }
    if (x < 0 || line.find_first_not_of(" \t\r", first + used) != std::string::npos)
      throw Error(Errc::ParseError, "expected a non-negative integer on line " + std::to_string(line_no));
    d.degrees.push_back(static_cast<std::size_t>(x));
    d.k_max = std::max(d.k_max, static_cast<std::size_t>(x));
  }
  return d;
}

struct SampleOptions {
  std::size_t max_retries = 10000;
  bool require_simple = false;  ///< also reject configurations with parallel edges
};

/// Uniform loop-free configuration-model multigraph with degree sequence `d`.
///
/// The 2m configuration points are paired by a Fisher-Yates shuffle; a
/// configuration containing a loop is discarded entirely and a new one is
/// drawn. The shuffle is generated pair by pair so a rejected configuration
/// is abandoned as soon as its first loop appears, which does not change the
/// distribution of accepted pairings.
inline MultiGraph sample_configuration(const DegreeSequence& d, Rng& rng, const SampleOptions& opts = {}) {
  validate(d);
  std::vector<std::uint32_t> points;
  points.reserve(d.total());
  for (std::uint32_t v = 0; v < d.degrees.size(); ++v) points.insert(points.end(), d.degrees[v], v);
  const std::size_t m = points.size() / 2;

  for (std::size_t attempt = 0; attempt < opts.max_retries; ++attempt) {
    bool ok = true;
    for (std::size_t i = 0; i < points.size() && ok; i += 2) {
      std::swap(points[i], points[i + rng.index(points.size() - i)]);
      std::swap(points[i + 1], points[i + 1 + rng.index(points.size() - i - 1)]);
      ok = points[i] != points[i + 1];
    }
    if (!ok) continue;
    MultiGraph g(d.size());
    for (std::size_t j = 0; j < m; ++j) g.add_edge(VertexId{points[2 * j]}, VertexId{points[2 * j + 1]});
    if (opts.require_simple && !g.is_simple()) continue;
    return g;
  }
  throw Error(Errc::ResampleLimitExceeded,
              "no acceptable configuration after " + std::to_string(opts.max_retries) + " attempts");
}

struct DominanceVerdict {
  std::size_t j = 0;
  double slack = 0.0;
  /// n_j - (alpha * n_{j-1} - slack); non-negative iff the verdict holds.
  double margin = 0.0;
  bool holds = true;
};

struct DominanceReport {
  double alpha = kAlpha;
  std::size_t k = 0;
  std::size_t n0 = 0;
  bool strict = false;
  std::vector<DominanceVerdict> verdicts;  ///< one per j in (3, k]
  bool member = true;
};

/// Slack of the j-th dominance inequality for class index k on an n-vertex
/// input: (ln^2 n - k) n^0.8 / 2^j, floored at zero.
inline double dominance_slack(std::size_t k, std::size_t j, std::size_t n) {
  if (n < 2) return 0.0;
  const double ln = std::log(static_cast<double>(n));
  const double s = (ln * ln - static_cast<double>(k)) * std::pow(static_cast<double>(n), 0.8) / std::ldexp(1.0, static_cast<int>(j));
  return s > 0.0 ? s : 0.0;
}

/// Checks n_j >= alpha n_{j-1} - slack for every 3 < j <= k on the histogram
/// `hist` (indexed by degree). Strict mode forces the slack to zero and
/// compares in exact integer arithmetic.
inline DominanceReport check_dominance(const std::vector<std::size_t>& hist, std::size_t k, std::size_t n0,
                                       bool strict = false) {
  DominanceReport r;
  r.k = k;
  r.n0 = n0;
  r.strict = strict;
  auto count = [&](std::size_t j) -> std::int64_t { return j < hist.size() ? static_cast<std::int64_t>(hist[j]) : 0; };
  for (std::size_t j = 4; j <= k; ++j) {
    DominanceVerdict v;
    v.j = j;
    const std::int64_t nj = count(j), nprev = count(j - 1);
    if (strict) {
      v.holds = kAlphaDen * nj >= kAlphaNum * nprev;
      v.margin = static_cast<double>(kAlphaDen * nj - kAlphaNum * nprev) / static_cast<double>(kAlphaDen);
    } else {
      v.slack = dominance_slack(k, j, n0);
      v.margin = static_cast<double>(nj) - (kAlpha * static_cast<double>(nprev) - v.slack);
      v.holds = v.margin >= 0.0;
    }
    r.member = r.member && v.holds;
    r.verdicts.push_back(v);
  }
  return r;
}

inline DominanceReport check_dominance(const MultiGraph& g, std::size_t k, std::size_t n0, bool strict = false) {
  return check_dominance(g.degree_histogram(), k, n0, strict);
}

/// Membership only; avoids building the verdict list on hot paths.
inline bool is_dominant(const std::vector<std::size_t>& hist, std::size_t k, std::size_t n0, bool strict) {
  auto count = [&](std::size_t j) -> std::int64_t { return j < hist.size() ? static_cast<std::int64_t>(hist[j]) : 0; };
  for (std::size_t j = 4; j <= k; ++j) {
    if (strict) {
      if (kAlphaDen * count(j) < kAlphaNum * count(j - 1)) return false;
    } else if (static_cast<double>(count(j)) < kAlpha * static_cast<double>(count(j - 1)) - dominance_slack(k, j, n0)) {
      return false;
    }
  }
  return true;
}

}  // namespace rcm
