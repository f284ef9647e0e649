// Command-line front end: generate graphs, run Reduce-Construct, and run the
// batch experiments.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rcmatch/rcmatch.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "' for reading");
  return in;
}

/// Writes through `fn` to `path`, or to stdout when path is empty or "-".
template <class Fn>
void write_to(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  fn(out);
  if (!out) throw UsageError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::vector<std::size_t> regular;
  std::string degrees;
  std::uint64_t seed = 1;
  std::string out;
  bool simple = false;
};

int cmd_generate(const GenerateArgs& a) {
  rcm::DegreeSequence d;
  if (!a.regular.empty()) {
    d = rcm::regular_sequence(a.regular[0], a.regular[1]);
  } else {
    auto in = open_in(a.degrees);
    d = rcm::read_degree_sequence(in);
  }
  rcm::Rng rng(a.seed);
  rcm::SampleOptions opts;
  opts.require_simple = a.simple;
  const rcm::MultiGraph g = rcm::sample_configuration(d, rng, opts);
  write_to(a.out, [&](std::ostream& os) { rcm::write_edge_list(os, g); });
  return kExitPass;
}

// ---------------------------------------------------------------------------
// match

struct MatchArgs {
  std::string graph;
  std::uint64_t seed = 1;
  std::size_t k = 0;
  bool fallback = false;
  bool verify = false;
  std::string out;
  std::string log;
  std::string trace;
};

int cmd_match(const MatchArgs& a) {
  auto in = open_in(a.graph);
  const rcm::MultiGraph g = rcm::read_edge_list(in);
  rcm::Rng rng(a.seed);
  rcm::ReduceOptions ro;
  ro.k = a.k;
  ro.capture_trace = !a.trace.empty();

  const auto start = std::chrono::steady_clock::now();
  rcm::PipelineResult res = rcm::reduce_construct(g, rng, ro);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::size_t rc_size = res.matching.size();
  bool used_fallback = false;
  if (a.fallback && res.matching.size() != g.num_vertices() / 2) {
    const auto t0 = std::chrono::steady_clock::now();
    res.matching = rcm::max_matching_exact(g);
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    used_fallback = true;
  }
  const rcm::MatchingCheck check = rcm::validate_matching(res.matching, g);

  if (!a.out.empty()) write_to(a.out, [&](std::ostream& os) { rcm::write_matching(os, res.matching, g); });
  if (!a.log.empty()) write_to(a.log, [&](std::ostream& os) { rcm::write_action_log(os, res.reduce.log); });
  if (!a.trace.empty())
    write_to(a.trace, [&](std::ostream& os) { rcm::write_trace_csv(os, res.reduce.trace, res.reduce.k); });

  std::ostream& os = a.out == "-" ? std::cerr : std::cout;
  os << "vertices=" << g.num_vertices() << " edges=" << g.num_edges() << '\n';
  os << "size=" << check.size << " valid=" << (check.valid ? "true" : "false")
     << " perfect=" << (check.perfect ? "true" : "false") << " seconds=" << seconds << '\n';
  if (a.fallback) os << "fallback=" << (used_fallback ? "used" : "unused") << " reduce_construct_size=" << rc_size << '\n';
  const rcm::KindCounts kinds = rcm::kind_counts(res.reduce.log);
  os << "kinds";
  for (std::size_t i = 0; i < rcm::kHyperKindCount; ++i)
    os << ' ' << rcm::to_string(static_cast<rcm::HyperKind>(i)) << '=' << kinds[i];
  os << '\n';

  int status = check.valid ? kExitPass : kExitFail;
  if (a.verify) {
    if (g.num_vertices() > 200) {
      os << "verify=skipped (more than 200 vertices)\n";
    } else {
      const std::size_t best = rcm::max_matching_exact(g).size();
      const bool same = best == check.size;
      os << "verify=" << (same ? "match" : "mismatch") << " oracle_size=" << best << '\n';
      if (!same) status = kExitFail;
    }
  }
  return status;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentArgs {
  std::string name;
  std::string n = "10000";
  std::size_t k = 3;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::string out;
};

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(item, &used);
      if (used != item.size() || v == 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError("--n expects a comma-separated list of positive integers, got '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError("--n is empty");
  return out;
}

void print_summary(std::ostream& os, const rcm::ExperimentOutcome& o) {
  const rcm::json& s = o.summary;
  os << "experiment " << o.name << "  k=" << s.value("k", 0) << "  trials=" << s.value("trials", 0)
     << "  seed=" << s.value("seed", 0) << '\n';
  if (o.name == "runtime-scaling") {
    os << std::setw(10) << "n" << std::setw(16) << "median_s" << '\n';
    for (const auto& r : s["results"])
      os << std::setw(10) << r["n"].get<std::size_t>() << std::setw(16) << r["median_seconds"].get<double>() << '\n';
    os << "slope " << s["slope"].get<double>() << " (required " << s["range"][0].get<double>() << ".."
       << s["range"][1].get<double>() << ")\n";
  } else {
    os << std::setw(10) << "n" << std::setw(12) << "successes" << std::setw(10) << "required" << std::setw(8)
       << "errors" << std::setw(12) << "seconds" << std::setw(6) << "pass" << '\n';
    for (const auto& r : s["results"])
      os << std::setw(10) << r["n"].get<std::size_t>() << std::setw(12) << r["successes"].get<std::size_t>()
         << std::setw(10) << r["required"].get<std::size_t>() << std::setw(8) << r["errors"].get<std::size_t>()
         << std::setw(12) << std::fixed << std::setprecision(3) << r["seconds"].get<double>() << std::defaultfloat
         << std::setw(6) << (r["pass"].get<bool>() ? "yes" : "no") << '\n';
  }
  os << (o.pass ? "PASS" : "FAIL") << '\n';
}

int cmd_experiment(const ExperimentArgs& a) {
  rcm::ExperimentParams p;
  p.n = parse_sizes(a.n);
  p.k = a.k;
  p.trials = a.trials;
  p.seed = a.seed;
  p.threads = a.threads != 0 ? a.threads : std::max(1u, std::thread::hardware_concurrency());

  fs::path dir = a.out;
  if (dir.empty()) {
    const char* env = std::getenv("RCMATCH_OUT_DIR");
    dir = fs::path(env != nullptr && *env != '\0' ? env : "rcmatch-out") / a.name;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory '" + dir.string() + "': " + ec.message());

  const rcm::ExperimentOutcome o = rcm::run_experiment(a.name, p);
  write_to((dir / "summary.json").string(), [&](std::ostream& os) { os << o.summary.dump(2) << '\n'; });
  write_to((dir / "trials.jsonl").string(), [&](std::ostream& os) {
    for (const auto& t : o.trials) os << rcm::trial_to_json(t).dump() << '\n';
  });
  write_to((dir / "trials.csv").string(), [&](std::ostream& os) { rcm::write_trials_csv(os, o.trials); });
  print_summary(std::cout, o);
  std::cout << "output " << dir.string() << '\n';
  return o.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduce-Construct matching for random multigraphs"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample a loop-free configuration multigraph");
  auto* reg = g->add_option("--regular", gen.regular, "n k for a k-regular sequence")->expected(2);
  auto* deg = g->add_option("--degrees", gen.degrees, "File with one degree per line");
  reg->excludes(deg);
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Output edge-list file (default stdout)");
  g->add_flag("--simple", gen.simple, "Also reject samples with parallel edges");

  MatchArgs match;
  auto* m = app.add_subcommand("match", "Run Reduce-Construct on an edge-list file");
  m->add_option("graph", match.graph, "Edge-list file")->required();
  m->add_option("--seed", match.seed, "Random seed");
  m->add_option("--k", match.k, "Class index for trace columns (default: max degree)");
  m->add_flag("--fallback", match.fallback, "Fall back to the exact matching when not perfect");
  m->add_flag("--verify", match.verify, "Compare the size against the exact matching (n <= 200)");
  m->add_option("--out", match.out, "Matching output file, one 'u v edge_id' line per edge");
  m->add_option("--log", match.log, "Action log output, JSON lines");
  m->add_option("--trace", match.trace, "Trace output, CSV");

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Run a seeded batch experiment");
  e->add_option("name", exp.name, "Experiment name")->required()->check(CLI::IsMember(rcm::experiment_names()));
  e->add_option("--n", exp.n, "Vertex count, or comma-separated list");
  e->add_option("--k", exp.k, "Degree of the regular input graphs");
  e->add_option("--trials", exp.trials, "Trials per vertex count");
  e->add_option("--seed", exp.seed, "Batch seed; trial t uses a stream derived from (seed, t)");
  e->add_option("--threads", exp.threads, "Worker threads (default: hardware concurrency)");
  e->add_option("--out", exp.out, "Output directory (default $RCMATCH_OUT_DIR/<name> or rcmatch-out/<name>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*g) {
      if (gen.regular.empty() == gen.degrees.empty()) throw UsageError("generate needs exactly one of --regular or --degrees");
      return cmd_generate(gen);
    }
    if (*m) return cmd_match(match);
    return cmd_experiment(exp);
  } catch (const rcm::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
}
