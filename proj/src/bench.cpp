#include "celltree/bench.hpp"

#include <charconv>
#include <cmath>

#include "celltree/lookahead.hpp"
#include "celltree/randomized.hpp"

namespace celltree {

namespace {

std::string number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::vector<CurveRow> run_risk_curve(const BenchSpec& spec) {
  if (spec.reps == 0) throw std::invalid_argument("reps must be at least 1");
  if (spec.n_grid.empty()) throw std::invalid_argument("n grid is empty");
  if (spec.m == 0) throw std::invalid_argument("m must be at least 1");
  const SyntheticDistribution dist = make_distribution(spec.distribution, spec.params);

  // Validate parameters once, up front.
  std::optional<double> alpha;
  if (spec.algorithm == Algorithm::lookahead) {
    LookaheadConfig(spec.alpha, spec.beta, dist.dim());
    alpha = spec.alpha;
  } else {
    RandomizedConfig(spec.beta, spec.seed);
  }

  RunOptions run;
  run.workers = spec.workers;

  std::vector<CurveRow> rows;
  for (std::size_t g = 0; g < spec.n_grid.size(); ++g) {
    const std::size_t n = spec.n_grid[g];
    const std::uint64_t grid_seed = derive_child_seed(spec.seed, g);
    std::vector<double> risks;
    for (std::size_t r = 0; r < spec.reps; ++r) {
      const std::uint64_t rep_seed = derive_child_seed(grid_seed, r);
      const Dataset data = dist.sample(n, derive_child_seed(rep_seed, 0));
      const std::uint64_t tree_seed = derive_child_seed(rep_seed, 1);
      const PartitionTree tree =
          spec.algorithm == Algorithm::lookahead
              ? build_lookahead(data, LookaheadConfig(spec.alpha, spec.beta, dist.dim(), tree_seed),
                                run)
              : build_randomized(data, RandomizedConfig(spec.beta, tree_seed), run);
      const RiskEstimate est =
          empirical_risk([&](std::span<const double> x) { return tree.classify(x); }, dist, spec.m,
                         derive_child_seed(rep_seed, 2), spec.workers);
      risks.push_back(est.mean);
      rows.push_back({dist.name(), spec.algorithm, alpha, spec.beta, n, 1, est.mean,
                      est.std_error, dist.bayes_risk(), "rep:" + std::to_string(r)});
    }
    double mean = 0.0;
    for (double v : risks) mean += v;
    mean /= static_cast<double>(risks.size());
    double se = rows.back().std_error;
    if (risks.size() >= 2) {
      double ss = 0.0;
      for (double v : risks) ss += (v - mean) * (v - mean);
      se = std::sqrt(ss / static_cast<double>(risks.size() - 1) / static_cast<double>(risks.size()));
    }
    rows.push_back({dist.name(), spec.algorithm, alpha, spec.beta, n, spec.reps, mean, se,
                    dist.bayes_risk(), "aggregate"});
  }
  return rows;
}

std::vector<CurveRow> aggregate_rows(std::span<const CurveRow> rows) {
  std::vector<CurveRow> out;
  for (const auto& r : rows)
    if (r.row == "aggregate") out.push_back(r);
  return out;
}

std::string curve_csv(std::span<const CurveRow> rows) {
  std::string out = "distribution,algorithm,alpha,beta,n,reps,mean_risk,std_error,bayes_risk,row\n";
  for (const auto& r : rows) {
    out += r.distribution;
    out += ',';
    out += to_string(r.algorithm);
    out += ',';
    if (r.alpha) out += number(*r.alpha);
    out += ',' + number(r.beta) + ',' + std::to_string(r.n) + ',' + std::to_string(r.reps) + ',' +
           number(r.mean_risk) + ',' + number(r.std_error) + ',' + number(r.bayes_risk) + ',' +
           r.row + '\n';
  }
  return out;
}

}  // namespace celltree
