#include "celltree/risk_lab.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "celltree/cell_runtime.hpp"
#include "celltree/median_partition.hpp"

namespace celltree {

SyntheticDistribution::SyntheticDistribution(std::string name, std::size_t d, Eta eta,
                                             double bayes_risk, std::string support)
    : name_(std::move(name)),
      d_(d),
      eta_(std::move(eta)),
      bayes_risk_(bayes_risk),
      support_(std::move(support)) {
  if (d_ == 0) throw std::invalid_argument("distribution dimension must be at least 1");
}

Label SyntheticDistribution::draw(CellStream& rng, std::span<double> x) const {
  for (double& v : x) v = rng.uniform01();
  return rng.uniform01() < eta_(x) ? Label{1} : Label{0};
}

Dataset SyntheticDistribution::sample(std::size_t n, std::uint64_t seed) const {
  CellStream rng(seed);
  std::vector<double> coords(n * d_);
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i)
    labels[i] = draw(rng, std::span<double>(coords.data() + i * d_, d_));
  return Dataset(d_, std::move(coords), std::move(labels));
}

std::vector<std::string> builtin_distributions() { return {"D-CONST", "D-LIN", "D-CHECKER"}; }

SyntheticDistribution make_distribution(std::string_view name, const DistributionParams& params) {
  const std::size_t d = params.d;
  if (d == 0) throw std::invalid_argument("distribution dimension must be at least 1");
  const std::string cube = "uniform on [0,1]^" + std::to_string(d);
  if (name == "D-CONST") {
    const double p = params.p;
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("D-CONST needs p in [0,1]");
    return SyntheticDistribution(
        "D-CONST", d, [p](std::span<const double>) { return p; }, std::min(p, 1.0 - p), cube);
  }
  if (name == "D-LIN") {
    // L* = integral over [0,1] of min(t, 1 - t) dt = 1/4.
    return SyntheticDistribution(
        "D-LIN", d, [](std::span<const double> x) { return x[0]; }, 0.25, cube);
  }
  if (name == "D-CHECKER") {
    if (d != 2) throw std::invalid_argument("D-CHECKER is defined for d = 2 only");
    return SyntheticDistribution(
        "D-CHECKER", 2,
        [](std::span<const double> x) { return (x[0] >= 0.5) != (x[1] >= 0.5) ? 0.9 : 0.1; }, 0.1,
        cube);
  }
  throw UnknownDistribution("unknown distribution '" + std::string(name) + "'");
}

Label bayes_classify(const SyntheticDistribution& dist, std::span<const double> x) {
  return dist.eta(x) > 0.5 ? Label{1} : Label{0};
}

namespace {

constexpr std::uint64_t kRiskBlock = 8192;

}  // namespace

RiskEstimate empirical_risk(const Classifier& classifier, const SyntheticDistribution& dist,
                            std::uint64_t m, std::uint64_t seed, std::size_t workers) {
  if (m == 0) throw std::invalid_argument("empirical risk needs m >= 1");
  const std::size_t blocks = static_cast<std::size_t>((m + kRiskBlock - 1) / kRiskBlock);
  std::vector<std::uint64_t> errors(blocks, 0);
  parallel_for(blocks, workers, [&](std::size_t b) {
    CellStream rng(derive_child_seed(seed, b));
    std::vector<double> x(dist.dim());
    const std::uint64_t begin = b * kRiskBlock;
    const std::uint64_t end = std::min<std::uint64_t>(m, begin + kRiskBlock);
    std::uint64_t wrong = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      const Label y = dist.draw(rng, x);
      wrong += classifier(x) != y;
    }
    errors[b] = wrong;
  });
  std::uint64_t wrong = 0;
  for (auto e : errors) wrong += e;
  const double p = static_cast<double>(wrong) / static_cast<double>(m);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(m)), m};
}

RiskEstimate dataset_risk(const Classifier& classifier, const Dataset& data) {
  if (data.empty()) return {0.0, 0.0, 0};
  std::uint64_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) wrong += classifier(data.x(i)) != data.y(i);
  const double m = static_cast<double>(data.size());
  const double p = static_cast<double>(wrong) / m;
  return {p, std::sqrt(p * (1.0 - p) / m), data.size()};
}

double estimate_cell_bayes_risk(const SyntheticDistribution& dist, std::span<const double> lo,
                                std::span<const double> hi, CellStream& rng, double target_se,
                                std::size_t max_draws) {
  const std::size_t d = dist.dim();
  std::vector<double> a(d), b(d);
  for (std::size_t j = 0; j < d; ++j) {
    a[j] = std::max(0.0, lo[j]);
    b[j] = std::min(1.0, hi[j]);
    if (!(a[j] < b[j])) return 0.0;  // the box has no mass
  }
  constexpr std::size_t kBatch = 256;
  std::vector<double> x(d);
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t draws = 0;
  while (draws < max_draws) {
    for (std::size_t i = 0; i < kBatch; ++i) {
      // X | X in A is uniform on the box because X is uniform on the cube.
      for (std::size_t j = 0; j < d; ++j) x[j] = a[j] + (b[j] - a[j]) * rng.uniform01();
      const double e = dist.eta(x);
      sum += e;
      sum_sq += e * e;
    }
    draws += kBatch;
    const double mean = sum / static_cast<double>(draws);
    const double var = std::max(0.0, sum_sq / static_cast<double>(draws) - mean * mean);
    if (std::sqrt(var / static_cast<double>(draws)) < target_se) break;
  }
  const double mean = sum / static_cast<double>(draws);
  return std::min(mean, 1.0 - mean);
}

LevelRiskEstimate estimate_level_risk(const SyntheticDistribution& dist, std::size_t n,
                                      std::size_t k, std::size_t reps, std::uint64_t seed,
                                      std::size_t queries, std::size_t workers) {
  if (reps == 0) throw std::invalid_argument("estimate_level_risk needs reps >= 1");
  if (queries == 0) throw std::invalid_argument("estimate_level_risk needs queries >= 1");
  const std::size_t shift = dist.dim() * k;
  if (shift >= 30 || n < (std::size_t{1} << shift))
    throw std::invalid_argument("estimate_level_risk needs n >= 2^(d*k)");

  std::vector<double> per_rep(reps, 0.0);
  std::vector<double> query_sd(reps, 0.0);
  parallel_for(reps, workers, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_child_seed(seed, r);
    const Dataset data = dist.sample(n, derive_child_seed(rep_seed, 0));
    const FullTree tree(DataView::all(data), k);
    std::vector<std::optional<double>> cell_risk(tree.leaves().size());

    CellStream rng(derive_child_seed(rep_seed, 1));
    std::vector<double> x(dist.dim());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t q = 0; q < queries; ++q) {
      dist.draw(rng, x);
      const std::size_t leaf = tree.locate(x);
      auto& cached = cell_risk[leaf];
      if (!cached) {
        const auto box = tree.leaf_box(leaf);
        CellStream cell_rng(derive_child_seed(derive_child_seed(rep_seed, 2), leaf));
        cached = estimate_cell_bayes_risk(dist, box.lo, box.hi, cell_rng);
      }
      sum += *cached;
      sum_sq += *cached * *cached;
    }
    const double mean = sum / static_cast<double>(queries);
    per_rep[r] = mean;
    query_sd[r] = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(queries) - mean * mean));
  });

  LevelRiskEstimate out;
  out.reps = reps;
  for (double v : per_rep) out.mean += v;
  out.mean /= static_cast<double>(reps);
  if (reps >= 2) {
    double ss = 0.0;
    for (double v : per_rep) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
  } else {
    out.std_error = query_sd[0] / std::sqrt(static_cast<double>(queries));
  }
  return out;
}

std::vector<std::uint64_t> depth_profile(const PartitionTree& tree,
                                         const SyntheticDistribution& dist, std::uint64_t m,
                                         std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("depth_profile needs m >= 1");
  if (tree.dim() != dist.dim()) throw std::invalid_argument("tree and distribution differ in d");
  std::vector<std::uint64_t> hist;
  CellStream rng(seed);
  std::vector<double> x(dist.dim());
  for (std::uint64_t i = 0; i < m; ++i) {
    dist.draw(rng, x);
    const std::size_t depth = tree.route(x).depth;
    if (hist.size() <= depth) hist.resize(depth + 1, 0);
    ++hist[depth];
  }
  return hist;
}

}  // namespace celltree
