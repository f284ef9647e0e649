#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "rcmatch/construct.hpp"
#include "rcmatch/genmodel.hpp"
#include "rcmatch/io.hpp"
#include "rcmatch/oracle.hpp"
#include "rcmatch/reduce.hpp"
#include "rcmatch/rng.hpp"
#include "rcmatch/stats.hpp"

namespace rcm {

/// What one trial computes. Every trial samples a k-regular configuration
/// multigraph on n vertices from its own derived stream and runs
/// Reduce-Construct on it.
struct TrialConfig {
  std::size_t n = 0;
  std::size_t k = 3;
  std::uint64_t seed = 0;
  bool capture_trace = true;
  bool bounds = true;
  bool drift = false;
  bool remA = false;
  bool excess = false;
  bool survival = false;
  bool stopping = false;
  bool oracle = false;  ///< compare against max_matching_exact
  bool strict = true;   ///< dominance mode for the p_3 check and t_j
  double remA_eps = 0.005;
  DriftOptions drift_options;
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;  ///< derived stream seed
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t edges = 0;
  std::size_t matching_size = 0;
  bool valid = false;
  bool perfect = false;
  double seconds = 0.0;  ///< reduce + construct wall time
  std::size_t actions = 0;
  std::size_t vertex_zero = 0;
  KindCounts kinds{};
  std::optional<std::size_t> oracle_size;
  std::optional<HardBoundReport> bounds;
  std::optional<DriftReport> drift;
  std::optional<RemAReport> remA;
  std::optional<ExcessReport> excess;
  std::optional<SurvivalReport> survival;
  std::optional<StoppingReport> stopping;
  std::string error;
};

inline TrialResult run_trial(const TrialConfig& cfg, std::size_t trial) {
  TrialResult r;
  r.trial = trial;
  r.seed = derive_seed(cfg.seed, trial);
  r.n = cfg.n;
  r.k = cfg.k;
  try {
    Rng rng(r.seed);
    const MultiGraph g = sample_configuration(regular_sequence(cfg.n, cfg.k), rng);
    r.edges = g.num_edges();
    MultiGraph work = g;
    ReduceOptions ro;
    ro.k = cfg.k;
    ro.n0 = cfg.n;
    ro.capture_trace = cfg.capture_trace;
    const auto start = std::chrono::steady_clock::now();
    ReduceResult red = run_reduce(work, rng, ro);
    const Matching m = unwind(red.log, g, rng);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const MatchingCheck check = validate_matching(m, g);
    r.matching_size = check.size;
    r.valid = check.valid;
    r.perfect = check.perfect;
    r.actions = red.log.actions.size();
    for (const Action& a : red.log.actions) r.vertex_zero += std::holds_alternative<VertexZero>(a) ? 1 : 0;
    r.kinds = kind_counts(red.log);
    if (cfg.oracle) r.oracle_size = max_matching_exact(g).size();

    const std::span<const TraceRecord> trace = red.trace;
    if (cfg.capture_trace) {
      if (cfg.bounds) r.bounds = hard_bounds(trace, cfg.k);
      if (cfg.drift) r.drift = drift_report(trace, cfg.k, cfg.n, cfg.drift_options);
      if (cfg.remA) r.remA = remA_check(trace, cfg.k, cfg.n, cfg.remA_eps, cfg.strict);
      if (cfg.excess) r.excess = excess_monitor(trace, cfg.k, cfg.n);
      if (cfg.survival) r.survival = survival_report(trace, cfg.k, cfg.n);
      if (cfg.stopping) r.stopping = stopping_report(trace, cfg.k, cfg.n, cfg.strict);
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

/// Runs trials 0..count-1 on `threads` workers. Results are indexed by
/// trial, so the output does not depend on scheduling.
inline std::vector<TrialResult> run_trials(const TrialConfig& cfg, std::size_t count, std::size_t threads = 1) {
  std::vector<TrialResult> out(count);
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < count; t = next++) out[t] = run_trial(cfg, t);
  };
  if (threads == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

/// Smallest success count that meets `fraction` of `trials`.
inline std::size_t required_successes(std::size_t trials, double fraction) {
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(trials) - 1e-9));
}

/// Least-squares slope of y on x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// ---------------------------------------------------------------------------
// Reporting

inline json trial_to_json(const TrialResult& r) {
  json j = {{"trial", r.trial},
            {"seed", r.seed},
            {"n", r.n},
            {"k", r.k},
            {"edges", r.edges},
            {"matching_size", r.matching_size},
            {"valid", r.valid},
            {"perfect", r.perfect},
            {"seconds", r.seconds},
            {"actions", r.actions},
            {"vertex_zero", r.vertex_zero},
            {"kinds", kinds_to_json(r.kinds)}};
  if (r.oracle_size) j["oracle_size"] = *r.oracle_size;
  if (r.bounds) j["bounds"] = *r.bounds;
  if (r.drift) {
    json d = *r.drift;
    d.erase("windows");
    j["drift"] = d;
  }
  if (r.remA) j["remA"] = *r.remA;
  if (r.excess) j["excess"] = *r.excess;
  if (r.survival) j["survival"] = *r.survival;
  if (r.stopping) j["stopping"] = *r.stopping;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline void write_trials_csv(std::ostream& os, const std::vector<TrialResult>& rs) {
  os << "trial,seed,n,k,edges,matching_size,valid,perfect,seconds,bad,t3,bounds_ok,drift_ok,remA_ok,excess_ok,"
        "survival_ok,error\n";
  auto flag = [](const auto& opt) -> std::string {
    if (!opt) return "";
    if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, DriftReport>)
      return opt->edge_ok ? "1" : "0";
    else
      return opt->pass() ? "1" : "0";
  };
  for (const TrialResult& r : rs) {
    const auto idx = [](HyperKind k) { return static_cast<std::size_t>(k); };
    os << r.trial << ',' << r.seed << ',' << r.n << ',' << r.k << ',' << r.edges << ',' << r.matching_size << ','
       << r.valid << ',' << r.perfect << ',' << r.seconds << ',' << r.kinds[idx(HyperKind::Bad)] + r.kinds[idx(HyperKind::T3c)]
       << ',' << r.kinds[idx(HyperKind::T3a)] + r.kinds[idx(HyperKind::T3b)] + r.kinds[idx(HyperKind::T3c)] << ','
       << flag(r.bounds) << ',' << flag(r.drift) << ',' << flag(r.remA) << ',' << flag(r.excess) << ','
       << flag(r.survival) << ',' << '"' << r.error << '"' << '\n';
  }
}

// ---------------------------------------------------------------------------
// Named experiments

struct ExperimentParams {
  std::vector<std::size_t> n{10000};
  std::size_t k = 3;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct ExperimentOutcome {
  std::string name;
  bool pass = false;
  json summary;
  std::vector<TrialResult> trials;  ///< all trials, all n
};

namespace detail {

inline ExperimentOutcome fraction_experiment(const std::string& name, const ExperimentParams& p, TrialConfig base,
                                             double fraction, const auto& success) {
  ExperimentOutcome out;
  out.name = name;
  out.pass = true;
  out.summary = {{"experiment", name}, {"k", p.k}, {"trials", p.trials}, {"seed", p.seed}, {"fraction", fraction}};
  json per_n = json::array();
  for (std::size_t n : p.n) {
    TrialConfig cfg = base;
    cfg.n = n;
    cfg.k = p.k;
    cfg.seed = p.seed;
    auto rs = run_trials(cfg, p.trials, p.threads);
    std::size_t ok = 0, errors = 0;
    double seconds = 0.0;
    for (const TrialResult& r : rs) {
      if (!r.error.empty()) ++errors;
      ok += r.error.empty() && success(r) ? 1 : 0;
      seconds += r.seconds;
    }
    const std::size_t need = required_successes(p.trials, fraction);
    const bool pass = ok >= need;
    out.pass = out.pass && pass;
    per_n.push_back({{"n", n}, {"successes", ok}, {"required", need}, {"errors", errors}, {"seconds", seconds}, {"pass", pass}});
    out.trials.insert(out.trials.end(), std::make_move_iterator(rs.begin()), std::make_move_iterator(rs.end()));
  }
  out.summary["results"] = per_n;
  out.summary["pass"] = out.pass;
  return out;
}

}  // namespace detail

inline ExperimentOutcome experiment_perfect_rate(const ExperimentParams& p) {
  return detail::fraction_experiment("perfect-rate", p, TrialConfig{}, 0.99,
                                     [](const TrialResult& r) { return r.valid && r.perfect; });
}

inline ExperimentOutcome experiment_drift(const ExperimentParams& p) {
  TrialConfig c;
  c.drift = true;
  c.drift_options.strict = false;
  return detail::fraction_experiment("drift", p, c, 1.0, [](const TrialResult& r) {
    return r.drift && r.drift->edge_ok && !r.drift->windows.empty();
  });
}

inline ExperimentOutcome experiment_remA(const ExperimentParams& p) {
  TrialConfig c;
  c.remA = true;
  return detail::fraction_experiment("remA", p, c, 1.0, [](const TrialResult& r) { return r.remA && r.remA->pass(); });
}

inline ExperimentOutcome experiment_excess(const ExperimentParams& p) {
  TrialConfig c;
  c.excess = true;
  return detail::fraction_experiment("excess", p, c, 0.99,
                                     [](const TrialResult& r) { return r.excess && r.excess->pass(); });
}

inline ExperimentOutcome experiment_survival(const ExperimentParams& p) {
  TrialConfig c;
  c.survival = true;
  c.stopping = true;
  return detail::fraction_experiment("survival", p, c, 0.95,
                                     [](const TrialResult& r) { return r.survival && r.survival->pass(); });
}

/// Log-log slope of median reduce+construct time against n. Trials run
/// sequentially so timings do not compete for cores, and round-robin over the
/// sizes so slow phases of the host hit every size alike.
inline ExperimentOutcome experiment_runtime_scaling(const ExperimentParams& p, double lo = 0.8, double hi = 1.25) {
  ExperimentOutcome out;
  out.name = "runtime-scaling";
  std::vector<TrialConfig> cfgs(p.n.size());
  for (std::size_t j = 0; j < p.n.size(); ++j) {
    cfgs[j].n = p.n[j];
    cfgs[j].k = p.k;
    cfgs[j].seed = p.seed;
    cfgs[j].capture_trace = false;
  }
  std::vector<std::vector<TrialResult>> rs(p.n.size());
  for (std::size_t t = 0; t < p.trials; ++t)
    for (std::size_t j = 0; j < p.n.size(); ++j) rs[j].push_back(run_trial(cfgs[j], t));

  std::vector<double> lx, ly;
  json per_n = json::array();
  for (std::size_t j = 0; j < p.n.size(); ++j) {
    std::vector<double> t;
    for (const TrialResult& r : rs[j])
      if (r.error.empty()) t.push_back(r.seconds);
    const double med = median(t);
    lx.push_back(std::log(static_cast<double>(p.n[j])));
    ly.push_back(std::log(std::max(med, 1e-9)));
    per_n.push_back({{"n", p.n[j]}, {"median_seconds", med}, {"trials", t.size()}});
    out.trials.insert(out.trials.end(), std::make_move_iterator(rs[j].begin()), std::make_move_iterator(rs[j].end()));
  }
  const double slope = p.n.size() >= 2 ? ols_slope(lx, ly) : 0.0;
  out.pass = p.n.size() >= 2 && slope >= lo && slope <= hi;
  out.summary = {{"experiment", out.name}, {"k", p.k},       {"trials", p.trials}, {"seed", p.seed},
                 {"results", per_n},       {"slope", slope}, {"range", {lo, hi}},  {"pass", out.pass}};
  return out;
}

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"perfect-rate", "runtime-scaling", "drift", "remA", "excess", "survival"};
  return names;
}

inline ExperimentOutcome run_experiment(const std::string& name, const ExperimentParams& p) {
  if (name == "perfect-rate") return experiment_perfect_rate(p);
  if (name == "runtime-scaling") return experiment_runtime_scaling(p);
  if (name == "drift") return experiment_drift(p);
  if (name == "remA") return experiment_remA(p);
  if (name == "excess") return experiment_excess(p);
  if (name == "survival") return experiment_survival(p);
  throw Error(Errc::ParseError, "unknown experiment '" + name + "'");
}

}  // namespace rcm
