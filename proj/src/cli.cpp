#include "celltree/cli.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <charconv>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "celltree/bench.hpp"
#include "celltree/dataset.hpp"
#include "celltree/hash.hpp"
#include "celltree/lookahead.hpp"
#include "celltree/randomized.hpp"
#include "celltree/risk_lab.hpp"
#include "celltree/tree.hpp"

namespace celltree::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

std::string content_hash(std::string_view bytes) {
  Fnv1a h;
  h.text(bytes);
  return hex64(h.digest());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Provenance record written next to every produced artifact. Contains no
/// timestamps, so identical invocations produce identical manifests.
struct RunManifest {
  std::string command;
  json flags = json::object();
  json config = json::object();
  json seeds = json::object();
  json inputs = json::array();
  json outputs = json::array();

  void add_input(const fs::path& path, std::string_view bytes) {
    inputs.push_back({{"path", path.string()}, {"fnv1a64", content_hash(bytes)}});
  }

  std::string dump() const {
    json j{{"tool", "celltree"}, {"version", kVersion}, {"command", command},
           {"flags", flags},     {"config", config},    {"seeds", seeds},
           {"inputs", inputs},   {"outputs", outputs}};
    j["id"] = content_hash(j.dump());
    return j.dump(2) + "\n";
  }
};

fs::path manifest_path_for(const fs::path& artifact) {
  return fs::path(artifact.string() + ".manifest.json");
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string algo;
  std::string data;
  double alpha = 0.1;
  std::optional<double> beta;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t trees = 1;
  std::string trace;
};

int cmd_train(const TrainArgs& a, std::size_t workers, std::ostream& out) {
  const auto algo = parse_algorithm(a.algo);
  if (!algo) throw UsageError("--algo must be randomized or lookahead");
  if (a.trees == 0) throw UsageError("--trees must be at least 1");
  if (a.trees > 1 && *algo != Algorithm::randomized)
    throw UsageError("--trees applies to the randomized algorithm only");

  const std::string csv = read_file(a.data);
  const Dataset data = parse_csv(csv);
  const double beta = a.beta.value_or(*algo == Algorithm::lookahead ? 0.2 : 0.5);

  RunOptions run;
  run.workers = workers;
  run.trace = !a.trace.empty();

  RunManifest manifest;
  manifest.command = "train";
  manifest.flags = {{"algo", a.algo}, {"data", a.data}, {"beta", beta},   {"seed", a.seed},
                    {"out", a.out},   {"trees", a.trees}, {"trace", a.trace}};
  manifest.seeds["root"] = a.seed;
  manifest.add_input(a.data, csv);

  std::string document;
  std::vector<CellRecord> trace;
  const fs::path out_path(a.out);
  const std::string manifest_ref = manifest_path_for(out_path).filename().string();
  if (*algo == Algorithm::lookahead) {
    manifest.flags["alpha"] = a.alpha;
    const LookaheadConfig config(a.alpha, beta, data.dim(), a.seed);
    manifest.config = {{"algorithm", "lookahead"}, {"alpha", a.alpha}, {"beta", beta}};
    BuildResult built = build_lookahead_traced(data, config, run);
    trace = std::move(built.trace);
    document = serialize(built.tree, manifest_ref);
  } else {
    const RandomizedConfig config(beta, a.seed);
    manifest.config = {{"algorithm", "randomized"}, {"beta", beta}, {"trees", a.trees}};
    if (a.trees == 1) {
      BuildResult built = build_randomized_traced(data, config, run);
      trace = std::move(built.trace);
      document = serialize(built.tree, manifest_ref);
    } else {
      const auto forest = build_ensemble(data, config, a.trees, run);
      json seeds = json::array();
      for (std::size_t t = 0; t < a.trees; ++t) seeds.push_back(ensemble_member_seed(a.seed, t));
      manifest.seeds["members"] = std::move(seeds);
      document = serialize_ensemble(forest, manifest_ref);
    }
  }

  write_file(out_path, document);
  manifest.outputs.push_back(out_path.string());
  if (!a.trace.empty()) {
    write_file(a.trace, trace_jsonl(trace));
    manifest.outputs.push_back(a.trace);
  }
  write_file(manifest_path_for(out_path), manifest.dump());
  out << "wrote " << out_path.string() << " (n=" << data.size() << ", d=" << data.dim() << ")\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string tree;
  std::string data;
  std::string dist;
  std::uint64_t m = 100000;
  std::uint64_t seed = 0;
  std::optional<std::size_t> dim;
  double p = 0.5;
  bool oracle = false;
};

int cmd_eval(const EvalArgs& a, std::size_t workers, std::ostream& out) {
  if (a.oracle && a.dist.empty()) throw UsageError("--oracle requires --dist");
  if (!a.oracle && a.tree.empty()) throw UsageError("--tree is required unless --oracle is given");
  if (a.data.empty() == a.dist.empty()) throw UsageError("give exactly one of --data or --dist");
  if (a.m == 0) throw UsageError("--m must be at least 1");

  std::vector<PartitionTree> forest;
  if (!a.tree.empty()) forest = deserialize_forest(read_file(a.tree));
  const std::size_t tree_dim = forest.empty() ? 0 : forest.front().dim();

  Classifier classify = [&](std::span<const double> x) {
    return forest.size() == 1 ? forest.front().classify(x) : ensemble_classify(forest, x);
  };

  if (!a.data.empty()) {
    const Dataset data = load_csv(a.data);
    if (data.dim() != tree_dim) throw UsageError("data dimension differs from the tree");
    const RiskEstimate r = dataset_risk(classify, data);
    out << "error_rate=" << fmt(r.mean) << " std_error=" << fmt(r.std_error)
        << " n_test=" << r.m << "\n";
    return kOk;
  }

  DistributionParams params;
  params.d = a.dim.value_or(tree_dim == 0 ? 2 : tree_dim);
  params.p = a.p;
  const SyntheticDistribution dist = make_distribution(a.dist, params);
  if (!forest.empty() && dist.dim() != tree_dim)
    throw UsageError("distribution dimension differs from the tree");
  if (a.oracle) classify = [&](std::span<const double> x) { return bayes_classify(dist, x); };
  const RiskEstimate r = empirical_risk(classify, dist, a.m, a.seed, workers);
  out << "error_rate=" << fmt(r.mean) << " std_error=" << fmt(r.std_error) << " n_test=" << r.m
      << " bayes_risk=" << fmt(dist.bayes_risk()) << " excess_risk=" << fmt(r.mean - dist.bayes_risk())
      << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string algo;
  std::string dist;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 1;
  std::uint64_t m = 100000;
  double alpha = 0.1;
  std::optional<double> beta;
  std::uint64_t seed = 0;
  std::size_t dim = 2;
  double p = 0.5;
  std::string out;
};

int cmd_bench(const BenchArgs& a, std::size_t workers, std::ostream& out) {
  const auto algo = parse_algorithm(a.algo);
  if (!algo) throw UsageError("--algo must be randomized or lookahead");
  if (a.reps == 0) throw UsageError("--reps must be at least 1");
  if (a.n_grid.empty()) throw UsageError("--n-grid is empty");
  if (a.m == 0) throw UsageError("--m must be at least 1");

  BenchSpec spec;
  spec.algorithm = *algo;
  spec.distribution = a.dist;
  spec.params = {a.dim, a.p};
  spec.n_grid = a.n_grid;
  spec.reps = a.reps;
  spec.m = a.m;
  spec.alpha = a.alpha;
  spec.beta = a.beta.value_or(*algo == Algorithm::lookahead ? 0.2 : 0.5);
  spec.seed = a.seed;
  spec.workers = workers;

  const std::string csv = curve_csv(run_risk_curve(spec));
  if (a.out.empty()) {
    out << csv;
    return kOk;
  }
  write_file(a.out, csv);
  RunManifest manifest;
  manifest.command = "bench";
  manifest.flags = {{"algo", a.algo}, {"dist", a.dist}, {"n_grid", a.n_grid},
                    {"reps", a.reps}, {"m", a.m},       {"beta", spec.beta},
                    {"seed", a.seed}, {"dim", a.dim},   {"p", a.p},
                    {"out", a.out}};
  if (*algo == Algorithm::lookahead) manifest.flags["alpha"] = a.alpha;
  manifest.config = {{"algorithm", a.algo}, {"beta", spec.beta}};
  manifest.seeds["root"] = a.seed;
  manifest.outputs.push_back(a.out);
  write_file(manifest_path_for(a.out), manifest.dump());
  out << "wrote " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_inspect(const std::string& path, std::ostream& out) {
  const auto forest = deserialize_forest(read_file(path));
  for (std::size_t t = 0; t < forest.size(); ++t) {
    const PartitionTree& tree = forest[t];
    const TreeStats s = tree.stats();
    if (forest.size() > 1) out << "tree " << t << "\n";
    out << "leaves: " << s.leaves << ", depth: " << s.max_depth
        << ", conservation: " << (tree.conserves() ? "pass" : "fail") << "\n";
    out << "algorithm: " << to_string(tree.config().algorithm) << "\n";
    out << "mode: " << to_string(tree.mode()) << "\n";
    out << "d: " << tree.dim() << "\n";
    out << "n: " << tree.sample_size() << "\n";
    out << "nodes: " << s.nodes << "\n";
    out << "depth histogram:";
    for (std::size_t depth = 0; depth < s.leaf_depths.size(); ++depth)
      if (s.leaf_depths[depth] > 0) out << " " << depth << ":" << s.leaf_depths[depth];
    out << "\n";
    out << "eaten pivots: " << s.eaten << "\n";
    out << "leaf points: " << s.leaf_points << "\n";
  }
  return kOk;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("CELLTREE_WORKERS")) {
    std::size_t v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return v;
    return 0;  // rejected after parsing
  }
  return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"celltree: cellular tree classifiers"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::size_t workers = default_workers();
  app.add_option("--workers", workers, "Worker threads (default: $CELLTREE_WORKERS or 1)")
      ->check(CLI::PositiveNumber);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Grow a tree from a CSV sample");
  train_cmd->add_option("--algo", train.algo, "randomized | lookahead")->required();
  train_cmd->add_option("--data", train.data, "CSV: d feature columns then a 0/1 label")->required();
  train_cmd->add_option("--alpha", train.alpha, "Lookahead horizon parameter")->capture_default_str();
  train_cmd->add_option("--beta", train.beta,
                        "Stopping parameter (default 0.2 lookahead, 0.5 randomized)");
  train_cmd->add_option("--seed", train.seed, "Root seed")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Tree document to write")->required();
  train_cmd->add_option("--trees", train.trees, "Ensemble size (randomized only)")
      ->capture_default_str();
  train_cmd->add_option("--trace", train.trace, "Write a line-delimited cell trace here");
  train_cmd->add_option("--workers", workers, "Worker threads");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Measure the error of a tree");
  eval_cmd->add_option("--tree", eval.tree, "Tree or ensemble document");
  eval_cmd->add_option("--data", eval.data, "Labelled CSV to evaluate on");
  eval_cmd->add_option("--dist", eval.dist, "Synthetic distribution: D-CONST | D-LIN | D-CHECKER");
  eval_cmd->add_option("--m", eval.m, "Number of evaluation draws")->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "Evaluation seed")->capture_default_str();
  eval_cmd->add_option("--dim", eval.dim, "Distribution dimension (default: the tree's)");
  eval_cmd->add_option("--p", eval.p, "D-CONST label probability")->capture_default_str();
  eval_cmd->add_flag("--oracle", eval.oracle, "Evaluate the Bayes classifier instead of a tree");
  eval_cmd->add_option("--workers", workers, "Worker threads");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand(
      "bench",
      "Risk curve over a grid of sample sizes. Aggregate rows report the mean risk\n"
      "over replications and its standard error (sample std. dev. / sqrt(reps)).");
  bench_cmd->add_option("--algo", bench.algo, "randomized | lookahead")->required();
  bench_cmd->add_option("--dist", bench.dist, "D-CONST | D-LIN | D-CHECKER")->required();
  bench_cmd->add_option("--n-grid", bench.n_grid, "Comma-separated sample sizes")
      ->required()
      ->delimiter(',');
  bench_cmd->add_option("--reps", bench.reps, "Replications per sample size")->capture_default_str();
  bench_cmd->add_option("--m", bench.m, "Evaluation draws per replication")->capture_default_str();
  bench_cmd->add_option("--alpha", bench.alpha, "Lookahead horizon parameter")->capture_default_str();
  bench_cmd->add_option("--beta", bench.beta, "Stopping parameter");
  bench_cmd->add_option("--seed", bench.seed, "Root seed")->capture_default_str();
  bench_cmd->add_option("--dim", bench.dim, "Distribution dimension")->capture_default_str();
  bench_cmd->add_option("--p", bench.p, "D-CONST label probability")->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "CSV file (default: stdout)");
  bench_cmd->add_option("--workers", workers, "Worker threads");

  std::string inspect_path;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarize a tree document");
  inspect_cmd->add_option("--tree", inspect_path, "Tree or ensemble document")->required();

  std::vector<const char*> argv{"celltree"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (workers == 0) throw UsageError("worker count (--workers or CELLTREE_WORKERS) must be a positive integer");
    if (train_cmd->parsed()) return cmd_train(train, workers, out);
    if (eval_cmd->parsed()) return cmd_eval(eval, workers, out);
    if (bench_cmd->parsed()) return cmd_bench(bench, workers, out);
    if (inspect_cmd->parsed()) return cmd_inspect(inspect_path, out);
  } catch (const AdmissibilityError& e) {
    err << "error: " << e.what() << "\n";
    return kAdmissibility;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}

}  // namespace celltree::cli
