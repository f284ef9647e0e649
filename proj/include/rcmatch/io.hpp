#pragma once

#include <cstddef>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rcmatch/error.hpp"
#include "rcmatch/reduce.hpp"
#include "rcmatch/stats.hpp"

namespace rcm {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Action log, one JSON object per line

namespace detail {

inline json records_to_json(const std::vector<EdgeRecord>& v) {
  json out = json::array();
  for (const EdgeRecord& r : v) out.push_back({r.edge.value, r.a.value, r.b.value});
  return out;
}

inline json absorbed_to_json(const std::vector<Absorbed>& v) {
  json out = json::array();
  for (const Absorbed& x : v) out.push_back({x.edge.value, x.former.value});
  return out;
}

inline std::vector<EdgeRecord> records_from_json(const json& j) {
  std::vector<EdgeRecord> out;
  for (const json& r : j)
    out.push_back({EdgeId{r.at(0).get<std::uint32_t>()}, VertexId{r.at(1).get<std::uint32_t>()},
                   VertexId{r.at(2).get<std::uint32_t>()}});
  return out;
}

inline std::vector<Absorbed> absorbed_from_json(const json& j) {
  std::vector<Absorbed> out;
  for (const json& r : j) out.push_back({EdgeId{r.at(0).get<std::uint32_t>()}, VertexId{r.at(1).get<std::uint32_t>()}});
  return out;
}

inline VertexId vid(const json& j, const char* key) { return VertexId{j.at(key).get<std::uint32_t>()}; }
inline EdgeId eid(const json& j, const char* key) { return EdgeId{j.at(key).get<std::uint32_t>()}; }

}  // namespace detail

inline json action_to_json(const Action& action) {
  json j;
  j["type"] = std::string(action_tag(action));
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, VertexZero>) {
          j["v"] = a.v.value;
        } else if constexpr (std::is_same_v<T, VertexOne>) {
          j["v"] = a.v.value;
          j["w"] = a.w.value;
          j["matched_edge"] = a.matched_edge.value;
          j["removed_edges"] = detail::records_to_json(a.removed_edges);
        } else if constexpr (std::is_same_v<T, Contraction>) {
          j["contracted"] = a.contracted.value;
          json nb = json::array();
          for (VertexId v : a.neighbors) nb.push_back(v.value);
          j["neighbors"] = nb;
          j["new_vertex"] = a.new_vertex.value;
          j["internal_dropped"] = a.internal_dropped;
          j["dropped"] = detail::records_to_json(a.dropped);
          j["absorbed"] = detail::absorbed_to_json(a.absorbed);
        } else if constexpr (std::is_same_v<T, MaxEdgeRemoval>) {
          j["v"] = a.v.value;
          j["u"] = a.u.value;
          j["edge"] = a.edge.value;
          j["deg_v_before"] = a.deg_v_before;
          j["deg_u_before"] = a.deg_u_before;
        } else {
          j["u"] = a.u.value;
          j["v"] = a.v.value;
          j["w"] = a.w.value;
          j["new_vertex"] = a.new_vertex.value;
          j["internal_dropped"] = a.internal_dropped;
          j["dropped"] = detail::records_to_json(a.dropped);
          j["absorbed"] = detail::absorbed_to_json(a.absorbed);
        }
      },
      action);
  return j;
}

inline Action action_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "vertex_zero") return VertexZero{detail::vid(j, "v")};
  if (type == "vertex_one")
    return VertexOne{detail::vid(j, "v"), detail::vid(j, "w"), detail::eid(j, "matched_edge"),
                     detail::records_from_json(j.at("removed_edges"))};
  if (type == "contraction") {
    Contraction c;
    c.contracted = detail::vid(j, "contracted");
    for (const json& v : j.at("neighbors")) c.neighbors.push_back(VertexId{v.get<std::uint32_t>()});
    c.new_vertex = detail::vid(j, "new_vertex");
    c.internal_dropped = j.at("internal_dropped").get<std::size_t>();
    c.dropped = detail::records_from_json(j.at("dropped"));
    c.absorbed = detail::absorbed_from_json(j.at("absorbed"));
    return c;
  }
  if (type == "max_edge_removal")
    return MaxEdgeRemoval{detail::vid(j, "v"), detail::vid(j, "u"), detail::eid(j, "edge"),
                          j.at("deg_v_before").get<std::size_t>(), j.at("deg_u_before").get<std::size_t>()};
  if (type == "auto_correction") {
    AutoCorrection c;
    c.u = detail::vid(j, "u");
    c.v = detail::vid(j, "v");
    c.w = detail::vid(j, "w");
    c.new_vertex = detail::vid(j, "new_vertex");
    c.internal_dropped = j.at("internal_dropped").get<std::size_t>();
    c.dropped = detail::records_from_json(j.at("dropped"));
    c.absorbed = detail::absorbed_from_json(j.at("absorbed"));
    return c;
  }
  throw Error(Errc::ParseError, "unknown action type '" + type + "'");
}

inline void write_action_log(std::ostream& os, const ActionLog& log) {
  for (const Action& a : log.actions) os << action_to_json(a).dump() << '\n';
}

/// Reads a log written by write_action_log. Boundaries are recomputed: every
/// max-edge removal starts a hyperaction, and the log end closes the last.
inline ActionLog read_action_log(std::istream& is) {
  ActionLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      log.actions.push_back(action_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, "log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < log.actions.size(); ++i)
    if (std::holds_alternative<MaxEdgeRemoval>(log.actions[i])) log.boundaries.push_back(i);
  log.boundaries.push_back(log.actions.size());
  return log;
}

// ---------------------------------------------------------------------------
// Trace CSV

/// One row per Gamma_i: i,kind,e_i,delta_i,Delta_i,ex_k,ex_{k-1},p_3,n_3..n_k,dominant.
/// `dominant` is membership of C_{3,k}, strict or with slack.
inline void write_trace_csv(std::ostream& os, std::span<const TraceRecord> trace, std::size_t k, bool strict = false) {
  os << "i,kind,e_i,delta_i,Delta_i,ex_" << k << ",ex_" << k - 1 << ",p_3";
  for (std::size_t r = 3; r <= k; ++r) os << ",n_" << r;
  os << ",dominant\n";
  const auto old_precision = os.precision(8);
  for (const TraceRecord& t : trace) {
    os << t.i << ',' << to_string(t.kind) << ',' << t.edges << ',' << t.min_degree << ',' << t.max_degree << ','
       << t.ex(k) << ',' << t.ex(k - 1) << ',' << t.p(3);
    for (std::size_t r = 3; r <= k; ++r) os << ',' << t.n(r);
    os << ',' << (t.dominant(k, strict) ? 1 : 0) << '\n';
  }
  os.precision(old_precision);
}

// ---------------------------------------------------------------------------
// Reports as JSON

inline json kinds_to_json(const KindCounts& c) {
  json j = json::object();
  for (std::size_t i = 0; i < kHyperKindCount; ++i) j[std::string(to_string(static_cast<HyperKind>(i)))] = c[i];
  return j;
}

inline void to_json(json& j, const StoppingReport& s) {
  json tau = json::object(), t = json::object();
  for (std::size_t x = 3; x <= s.k && x < s.tau.size(); ++x) {
    tau[std::to_string(x)] = {{"index", s.tau[x]}, {"edges", s.e_at_tau[x]}};
    t[std::to_string(x)] = {{"index", s.t[x]}, {"edges", s.e_at_t[x]}};
  }
  j = {{"k", s.k}, {"n0", s.n0}, {"strict", s.strict}, {"edge_floor", s.edge_floor}, {"n_k0", s.n_k0},
       {"tau", tau}, {"t", t}};
}

inline void to_json(json& j, const DriftReport& r) {
  json windows = json::array();
  for (const DriftWindow& w : r.windows) {
    json dn = json::object();
    for (std::size_t x = 3; x < w.mean_dn.size(); ++x)
      dn[std::to_string(x)] = {{"observed", w.mean_dn[x]}, {"predicted", w.pred_dn[x]}, {"z", w.z_dn[x]}};
    json dex = json::object();
    for (std::size_t l = 3; l < w.mean_dex.size(); ++l)
      if (w.dex_steps[l] > 0)
        dex[std::to_string(l)] = {{"observed", w.mean_dex[l]}, {"bound", w.bound_dex[l]}, {"steps", w.dex_steps[l]}};
    windows.push_back({{"begin", w.begin},
                       {"end", w.end},
                       {"mean_de", w.mean_de},
                       {"pred_de", w.pred_de},
                       {"edge_ok", w.edge_ok},
                       {"p3_mean", w.p3_mean},
                       {"t3_freq", w.t3_freq},
                       {"rare_freq", w.rare_freq},
                       {"kinds_ok", w.kinds_ok},
                       {"dn", dn},
                       {"dex", dex}});
  }
  j = {{"k", r.k},
       {"n0", r.n0},
       {"window", r.window},
       {"tolerance", r.tolerance},
       {"strict", r.strict},
       {"horizon", r.horizon},
       {"windows_checked", r.windows.size()},
       {"max_edge_error", r.max_edge_error},
       {"edge_ok", r.edge_ok},
       {"kinds_ok", r.kinds_ok},
       {"windows", windows}};
}

inline void to_json(json& j, const RemAReport& r) {
  json v = json::array();
  for (const P3Violation& x : r.violations) v.push_back({{"i", x.i}, {"p3", x.p3}});
  j = {{"k", r.k},         {"n0", r.n0},
       {"eps", r.eps},     {"strict", r.strict},
       {"applicable", r.applicable},
       {"bound", r.bound}, {"bound_inverse_exponent", r.bound_inverse},
       {"anchor", kP3Anchor},
       {"checked", r.checked}, {"max_p3", r.max_p3},
       {"violations", v},  {"pass", r.pass()}};
}

inline void to_json(json& j, const ExcessReport& r) {
  j = {{"k", r.k},
       {"n0", r.n0},
       {"limit", r.limit},
       {"edge_floor", r.edge_floor},
       {"range", r.range},
       {"max_excess", r.max_excess},
       {"bounded", r.bounded},
       {"bad", r.bad},
       {"bad_above_three", r.bad_above_three},
       {"first_bad", r.first_bad},
       {"good", r.good},
       {"pass", r.pass()}};
}

inline void to_json(json& j, const SurvivalReport& r) {
  j = {{"k", r.k},         {"n0", r.n0},
       {"tau", r.tau},     {"e0", r.e0},
       {"e_tau", r.e_tau}, {"ratio", r.ratio},
       {"n_k0", r.n_k0},   {"edge_factor", r.edge_factor},
       {"time_bound", r.time_bound},
       {"edge_ok", r.edge_ok},
       {"time_ok", r.time_ok},
       {"note", r.note},   {"pass", r.pass()}};
}

inline void to_json(json& j, const HardBoundReport& r) {
  json samples = json::array();
  for (const BoundViolation& v : r.samples)
    samples.push_back({{"i", v.i},
                       {"kind", std::string(to_string(v.kind))},
                       {"quantity", v.quantity},
                       {"index", v.index},
                       {"change", v.change},
                       {"limit", v.limit}});
  json by_ell = json::object();
  for (std::size_t l = 3; l < r.excess_by_ell.size(); ++l) by_ell[std::to_string(l)] = r.excess_by_ell[l];
  j = {{"checked", r.checked},
       {"edge_violations", r.edge_violations},
       {"vertex_violations", r.vertex_violations},
       {"excess_violations", r.excess_violations},
       {"excess_increase_violations", r.excess_increase_violations},
       {"excess_violations_by_ell", by_ell},
       {"samples", samples},
       {"pass", r.pass()}};
}

}  // namespace rcm
