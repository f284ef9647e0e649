#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include "rcmatch/error.hpp"
#include "rcmatch/genmodel.hpp"
#include "rcmatch/reduce.hpp"

namespace rcm {

// ---------------------------------------------------------------------------
// Thresholds and closed-form predictions

/// Edge floor n^0.9 on the original vertex count.
inline double edge_floor(std::size_t n0) { return std::pow(static_cast<double>(n0), 0.9); }

/// log^2 n with the natural logarithm.
inline double log_squared(std::size_t n0) {
  const double l = n0 > 1 ? std::log(static_cast<double>(n0)) : 0.0;
  return l * l;
}

inline double predict_edge_drift(const TraceRecord& r) { return -1.0 - 2.0 * r.p(3); }

/// Expected n_{r,i+1} - n_{r,i}, including the max-degree vertex moving from
/// Delta_i to Delta_i - 1.
inline double predict_vertex_drift(const TraceRecord& r, std::size_t deg) {
  double pairs = 0.0;
  const std::size_t top = r.hist.size();
  for (std::size_t j1 = 3; j1 < top; ++j1) {
    if (j1 > deg + 2 - 3) break;
    const std::size_t j2 = deg + 2 - j1;
    if (j2 >= 3 && j2 < top) pairs += r.p(j1) * r.p(j2);
  }
  double v = r.p(deg + 1) - r.p(deg) + r.p(3) * (pairs - 2.0 * r.p(deg));
  if (r.max_degree == deg + 1) v += 1.0;
  if (r.max_degree == deg) v -= 1.0;
  return v;
}

/// Upper bound on E[ex_{l,i+1} - ex_{l,i}] while ex_{l,i} > 0.
inline double excess_drift_bound(const TraceRecord& r, std::size_t ell) {
  const double p3 = r.p(3);
  return -(1.0 - p3) - r.p(ell + 1) - p3 * p3 * p3 + static_cast<double>(ell - 3) * p3 * (1.0 - p3) * (1.0 - p3);
}

/// 3 / sum_{j=3}^{k-1} alpha^{j-3} j, or with alpha^{3-j} when `inverse_exponent`.
inline double p3_bound(std::size_t k, bool inverse_exponent = false) {
  double s = 0.0;
  for (std::size_t j = 3; j + 1 <= k; ++j) {
    const double e = static_cast<double>(j) - 3.0;
    s += std::pow(kAlpha, inverse_exponent ? -e : e) * static_cast<double>(j);
  }
  return s > 0.0 ? 3.0 / s : 1.0;
}

inline constexpr double kP3Anchor = 0.081;

// ---------------------------------------------------------------------------
// Stopping times

/// First trace index with Delta_i <= j or e_i < n^0.9. Always defined, since
/// the final record is the empty graph.
inline std::size_t tau(std::span<const TraceRecord> trace, std::size_t j, std::size_t n0) {
  const double floor = edge_floor(n0);
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (trace[i].max_degree <= j || static_cast<double>(trace[i].edges) < floor) return i;
  return trace.empty() ? 0 : trace.size() - 1;
}

/// First trace index with Gamma_i outside C_{3,j} or e_i < n^0.9.
inline std::size_t t_exit(std::span<const TraceRecord> trace, std::size_t j, std::size_t n0, bool strict) {
  const double floor = edge_floor(n0);
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (!trace[i].dominant(j, strict) || static_cast<double>(trace[i].edges) < floor) return i;
  return trace.empty() ? 0 : trace.size() - 1;
}

struct StoppingReport {
  std::size_t k = 0;
  std::size_t n0 = 0;
  bool strict = true;
  double edge_floor = 0.0;
  std::size_t n_k0 = 0;
  std::vector<std::size_t> tau;       ///< indexed by j; entries below 3 unused
  std::vector<std::size_t> t;         ///< indexed by j; entries below 3 unused
  std::vector<std::size_t> e_at_tau;
  std::vector<std::size_t> e_at_t;
};

inline StoppingReport stopping_report(std::span<const TraceRecord> trace, std::size_t k, std::size_t n0,
                                      bool strict = true) {
  StoppingReport s;
  s.k = k;
  s.n0 = n0;
  s.strict = strict;
  s.edge_floor = edge_floor(n0);
  s.n_k0 = trace.empty() ? 0 : trace[0].n(k);
  s.tau.assign(k + 1, 0);
  s.t.assign(k + 1, 0);
  s.e_at_tau.assign(k + 1, 0);
  s.e_at_t.assign(k + 1, 0);
  if (trace.empty()) return s;
  for (std::size_t j = 3; j <= k; ++j) {
    s.tau[j] = tau(trace, j, n0);
    s.t[j] = t_exit(trace, j, n0, strict);
    s.e_at_tau[j] = trace[s.tau[j]].edges;
    s.e_at_t[j] = trace[s.t[j]].edges;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Drift

struct DriftWindow {
  std::size_t begin = 0;  ///< first transition i (Gamma_i -> Gamma_{i+1})
  std::size_t end = 0;    ///< one past the last transition
  double mean_de = 0.0;
  double pred_de = 0.0;
  bool edge_ok = true;
  /// Indexed by r; observed and predicted mean change of n_r, and z-score.
  std::vector<double> mean_dn, pred_dn, z_dn;
  /// Indexed by l; means over the steps with ex_l > 0.
  std::vector<double> mean_dex, bound_dex;
  std::vector<std::size_t> dex_steps;
  double p3_mean = 0.0;
  double t3_freq = 0.0;
  double rare_freq = 0.0;  ///< T2 + T3b + T4
  bool kinds_ok = true;
};

struct DriftReport {
  std::size_t k = 0;
  std::size_t n0 = 0;
  std::size_t window = 0;
  double tolerance = 0.0;
  bool strict = false;
  std::size_t horizon = 0;  ///< transitions [0, horizon) are analysed
  std::vector<DriftWindow> windows;
  double max_edge_error = 0.0;
  bool edge_ok = true;
  bool kinds_ok = true;
};

struct DriftOptions {
  std::size_t window = 1000;
  double tolerance = 0.05;
  /// Dominance mode used for t_{k-1}.
  bool strict = false;
  double t3_tolerance = 0.02;
  double rare_limit = 0.01;
};

/// Windowed comparison of observed per-hyperaction changes against the
/// predicted drifts. Only transitions before t_{k-1} whose source graph has
/// max degree above 3 are analysed.
inline DriftReport drift_report(std::span<const TraceRecord> trace, std::size_t k, std::size_t n0,
                                const DriftOptions& opts = {}) {
  DriftReport rep;
  rep.k = k;
  rep.n0 = n0;
  rep.window = opts.window;
  rep.tolerance = opts.tolerance;
  rep.strict = opts.strict;
  const std::size_t above_three = static_cast<std::size_t>(
      std::count_if(trace.begin(), trace.end(), [](const TraceRecord& r) { return r.max_degree > 3; }));
  if (opts.window == 0 || above_three < opts.window)
    throw Error(Errc::TraceTooShort, "trace has " + std::to_string(above_three) +
                                         " boundaries with max degree above 3, window is " +
                                         std::to_string(opts.window));
  std::size_t horizon = std::min(t_exit(trace, k - 1, n0, opts.strict), trace.size() - 1);
  for (std::size_t i = 0; i < horizon; ++i)
    if (trace[i].max_degree <= 3) {
      horizon = i;
      break;
    }
  rep.horizon = horizon;

  for (std::size_t b = 0; b + opts.window <= horizon; b += opts.window) {
    DriftWindow w;
    w.begin = b;
    w.end = b + opts.window;
    const double len = static_cast<double>(opts.window);
    std::size_t top = k;
    for (std::size_t i = w.begin; i <= w.end; ++i) top = std::max(top, trace[i].max_degree);
    std::vector<double> sum_dn(top + 1, 0.0), sq_dn(top + 1, 0.0), sum_pred(top + 1, 0.0);
    w.mean_dex.assign(k + 1, 0.0);
    w.bound_dex.assign(k + 1, 0.0);
    w.dex_steps.assign(k + 1, 0);
    std::size_t t3 = 0, rare = 0;
    for (std::size_t i = w.begin; i < w.end; ++i) {
      const TraceRecord& a = trace[i];
      const TraceRecord& c = trace[i + 1];
      w.pred_de += predict_edge_drift(a);
      w.p3_mean += a.p(3);
      for (std::size_t r = 3; r <= top; ++r) {
        const double d = static_cast<double>(c.n(r)) - static_cast<double>(a.n(r));
        sum_dn[r] += d;
        sq_dn[r] += d * d;
        sum_pred[r] += predict_vertex_drift(a, r);
      }
      for (std::size_t l = 3; l <= k; ++l) {
        if (a.ex(l) == 0) continue;
        w.mean_dex[l] += static_cast<double>(c.ex(l)) - static_cast<double>(a.ex(l));
        w.bound_dex[l] += excess_drift_bound(a, l);
        ++w.dex_steps[l];
      }
      if (is_type3(c.kind)) ++t3;
      if (c.kind == HyperKind::T2 || c.kind == HyperKind::T3b || c.kind == HyperKind::T4) ++rare;
    }
    w.mean_de = (static_cast<double>(trace[w.end].edges) - static_cast<double>(trace[w.begin].edges)) / len;
    w.pred_de /= len;
    w.p3_mean /= len;
    w.edge_ok = std::abs(w.mean_de - w.pred_de) <= opts.tolerance;
    w.mean_dn.assign(top + 1, 0.0);
    w.pred_dn.assign(top + 1, 0.0);
    w.z_dn.assign(top + 1, 0.0);
    for (std::size_t r = 3; r <= top; ++r) {
      w.mean_dn[r] = sum_dn[r] / len;
      w.pred_dn[r] = sum_pred[r] / len;
      const double var = std::max(sq_dn[r] / len - w.mean_dn[r] * w.mean_dn[r], 0.0);
      const double se = std::sqrt(var / len);
      w.z_dn[r] = se > 0.0 ? (w.mean_dn[r] - w.pred_dn[r]) / se : 0.0;
    }
    for (std::size_t l = 3; l <= k; ++l) {
      if (w.dex_steps[l] == 0) continue;
      w.mean_dex[l] /= static_cast<double>(w.dex_steps[l]);
      w.bound_dex[l] /= static_cast<double>(w.dex_steps[l]);
    }
    w.t3_freq = static_cast<double>(t3) / len;
    w.rare_freq = static_cast<double>(rare) / len;
    w.kinds_ok = std::abs(w.t3_freq - w.p3_mean) <= opts.t3_tolerance && w.rare_freq < opts.rare_limit;
    rep.max_edge_error = std::max(rep.max_edge_error, std::abs(w.mean_de - w.pred_de));
    rep.edge_ok = rep.edge_ok && w.edge_ok;
    rep.kinds_ok = rep.kinds_ok && w.kinds_ok;
    rep.windows.push_back(std::move(w));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// p_3 bound

struct P3Violation {
  std::size_t i = 0;
  double p3 = 0.0;
};

struct RemAReport {
  std::size_t k = 0;
  std::size_t n0 = 0;
  double eps = 0.0;
  bool strict = true;
  bool applicable = false;  ///< k >= 8
  double bound = 0.0;       ///< alpha^{j-3} denominator
  double bound_inverse = 0.0;  ///< alpha^{3-j} denominator, informational
  std::size_t checked = 0;
  double max_p3 = 0.0;
  std::vector<P3Violation> violations;

  bool pass() const { return violations.empty(); }
};

/// Checks p_{3,i} against the closed-form bound and the 0.081 anchor at
/// every boundary with Gamma_i in C_{3,k-1} and e_i >= n^0.9.
inline RemAReport remA_check(std::span<const TraceRecord> trace, std::size_t k, std::size_t n0, double eps = 0.005,
                             bool strict = true) {
  RemAReport rep;
  rep.k = k;
  rep.n0 = n0;
  rep.eps = eps;
  rep.strict = strict;
  rep.applicable = k >= 8;
  rep.bound = p3_bound(k);
  rep.bound_inverse = p3_bound(k, true);
  const double floor = edge_floor(n0);
  for (const TraceRecord& r : trace) {
    if (static_cast<double>(r.edges) < floor || !r.dominant(k - 1, strict)) continue;
    ++rep.checked;
    const double p3 = r.p(3);
    rep.max_p3 = std::max(rep.max_p3, p3);
    if (p3 > rep.bound + eps || p3 > kP3Anchor + eps) rep.violations.push_back({r.i, p3});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Excess and goodness

struct ExcessReport {
  std::size_t k = 0;
  std::size_t n0 = 0;
  double limit = 0.0;       ///< log^2 n
  double edge_floor = 0.0;  ///< n^0.9
  std::size_t range = 0;    ///< boundaries [0, range) have e_i >= n^0.9
  std::size_t max_excess = 0;
  bool bounded = true;
  std::size_t bad = 0;             ///< bad hyperactions leaving a boundary in range
  std::size_t bad_above_three = 0; ///< same, restricted to Delta_i > 3
  std::size_t first_bad = 0;       ///< trace index of the first bad hyperaction's source
  bool good = true;

  bool pass() const { return bounded && good; }
};

inline ExcessReport excess_monitor(std::span<const TraceRecord> trace, std::size_t k, std::size_t n0) {
  ExcessReport rep;
  rep.k = k;
  rep.n0 = n0;
  rep.limit = log_squared(n0);
  rep.edge_floor = edge_floor(n0);
  while (rep.range < trace.size() && static_cast<double>(trace[rep.range].edges) >= rep.edge_floor) ++rep.range;
  for (std::size_t i = 0; i < rep.range; ++i) {
    rep.max_excess = std::max(rep.max_excess, trace[i].ex(k));
    if (i + 1 < trace.size() && !is_good(trace[i + 1].kind)) {
      if (rep.bad == 0) rep.first_bad = i;
      ++rep.bad;
      if (trace[i].max_degree > 3) ++rep.bad_above_three;
    }
  }
  rep.bounded = static_cast<double>(rep.max_excess) <= rep.limit;
  rep.good = rep.bad == 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Survival

struct SurvivalReport {
  std::size_t k = 0;
  std::size_t n0 = 0;
  std::size_t tau = 0;  ///< tau_{k-1}
  std::size_t e0 = 0;
  std::size_t e_tau = 0;
  double ratio = 0.0;
  std::size_t n_k0 = 0;
  double edge_factor = 0.0;  ///< required e_tau / e0
  double time_bound = 0.0;   ///< 1.5 n_{k,0} + n^0.6, k >= 8 only
  bool edge_ok = true;
  bool time_ok = true;
  std::string note;

  bool pass() const { return edge_ok && time_ok; }
};

inline SurvivalReport survival_report(std::span<const TraceRecord> trace, std::size_t k, std::size_t n0) {
  SurvivalReport rep;
  rep.k = k;
  rep.n0 = n0;
  if (trace.empty()) return rep;
  rep.e0 = trace[0].edges;
  rep.n_k0 = trace[0].n(k);
  if (k <= 3) {
    rep.note = "max degree is already 3; tau_{k-1} is not defined above 3";
    return rep;
  }
  rep.tau = tau(trace, k - 1, n0);
  rep.e_tau = trace[rep.tau].edges;
  rep.ratio = rep.e0 == 0 ? 0.0 : static_cast<double>(rep.e_tau) / static_cast<double>(rep.e0);
  if (k >= 8) {
    rep.edge_factor = 1.0 - 4.0 / static_cast<double>(k);
    rep.time_bound = 1.5 * static_cast<double>(rep.n_k0) + std::pow(static_cast<double>(n0), 0.6);
    rep.time_ok = static_cast<double>(rep.tau) <= rep.time_bound;
  } else if (k >= 5) {
    rep.edge_factor = 1e-25;
    rep.note = "edge bound e0/10^25 is non-binding at this scale";
  } else {
    rep.note = "no survival bound for k = 4; ratio reported only";
  }
  rep.edge_ok = rep.ratio >= rep.edge_factor;
  return rep;
}

// ---------------------------------------------------------------------------
// Per-step hard bounds

struct BoundViolation {
  std::size_t i = 0;
  HyperKind kind = HyperKind::Bad;
  std::string quantity;  ///< "e", "n_r" or "ex_l"
  std::size_t index = 0; ///< r or l
  long long change = 0;
  long long limit = 0;
};

struct HardBoundReport {
  std::size_t checked = 0;  ///< good hyperactions with Delta_i > 3
  std::size_t edge_violations = 0;
  std::size_t vertex_violations = 0;
  std::size_t excess_violations = 0;
  /// Excess violations where the change is an increase above the limit.
  std::size_t excess_increase_violations = 0;
  /// Excess violations per l.
  std::vector<std::size_t> excess_by_ell;
  std::vector<BoundViolation> samples;  ///< first few violations

  static constexpr std::size_t kMaxSamples = 16;

  std::size_t violations() const { return edge_violations + vertex_violations + excess_violations; }
  bool pass() const { return violations() == 0; }

  void merge(const HardBoundReport& o) {
    checked += o.checked;
    edge_violations += o.edge_violations;
    vertex_violations += o.vertex_violations;
    excess_violations += o.excess_violations;
    excess_increase_violations += o.excess_increase_violations;
    if (excess_by_ell.size() < o.excess_by_ell.size()) excess_by_ell.resize(o.excess_by_ell.size(), 0);
    for (std::size_t l = 0; l < o.excess_by_ell.size(); ++l) excess_by_ell[l] += o.excess_by_ell[l];
    for (const auto& v : o.samples)
      if (samples.size() < kMaxSamples) samples.push_back(v);
  }
};

/// |de| <= 6, |dn_r| <= 5 for r >= 3, and |dex_l| <= l - 3 + [ex_l = 0] for
/// 3 <= l <= k, over every good hyperaction whose source has max degree > 3.
inline HardBoundReport hard_bounds(std::span<const TraceRecord> trace, std::size_t k) {
  HardBoundReport rep;
  rep.excess_by_ell.assign(k + 1, 0);
  auto note = [&](std::size_t i, HyperKind kind, const char* q, std::size_t idx, long long change, long long limit) {
    if (rep.samples.size() < HardBoundReport::kMaxSamples) rep.samples.push_back({i, kind, q, idx, change, limit});
  };
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const TraceRecord& a = trace[i];
    const TraceRecord& c = trace[i + 1];
    if (!is_good(c.kind) || a.max_degree <= 3) continue;
    ++rep.checked;
    const long long de = static_cast<long long>(c.edges) - static_cast<long long>(a.edges);
    if (std::llabs(de) > 6) {
      ++rep.edge_violations;
      note(i, c.kind, "e", 0, de, 6);
    }
    const std::size_t top = std::max(a.hist.size(), c.hist.size());
    for (std::size_t r = 3; r < top; ++r) {
      const long long dn = static_cast<long long>(c.n(r)) - static_cast<long long>(a.n(r));
      if (std::llabs(dn) > 5) {
        ++rep.vertex_violations;
        note(i, c.kind, "n_r", r, dn, 5);
      }
    }
    for (std::size_t l = 3; l <= k; ++l) {
      const long long dx = static_cast<long long>(c.ex(l)) - static_cast<long long>(a.ex(l));
      const long long limit = static_cast<long long>(l) - 3 + (a.ex(l) == 0 ? 1 : 0);
      if (std::llabs(dx) > limit) {
        ++rep.excess_violations;
        ++rep.excess_by_ell[l];
        if (dx > limit) ++rep.excess_increase_violations;
        note(i, c.kind, "ex_l", l, dx, limit);
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Kind counts

using KindCounts = std::array<std::size_t, kHyperKindCount>;

inline KindCounts kind_counts(std::span<const TraceRecord> trace) {
  KindCounts c{};
  for (const TraceRecord& r : trace) ++c[static_cast<std::size_t>(r.kind)];
  return c;
}

inline KindCounts kind_counts(const ActionLog& log) {
  KindCounts c{};
  for (const Hyperaction& h : group_and_classify(log.actions)) ++c[static_cast<std::size_t>(h.kind)];
  return c;
}

}  // namespace rcm
