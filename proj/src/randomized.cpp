#include "celltree/randomized.hpp"

#include <cmath>

#include "celltree/median_partition.hpp"

namespace celltree {

RandomizedConfig::RandomizedConfig(double beta, std::uint64_t seed) : beta_(beta), seed_(seed) {
  if (!(beta > 0.0 && beta < 1.0))
    throw AdmissibilityError("randomized rule requires 0 < beta < 1");
}

double phi(std::uint64_t n, double beta) {
  if (n < 3) return 1.0;
  // Natural logarithm; another base only rescales phi by a constant.
  return 1.0 / std::pow(std::log(static_cast<double>(n)), beta);
}

CellOutcome randomized_cell(const DataView& view, std::uint64_t seed, double beta) {
  CellStream rng(seed);
  const double u = rng.uniform01();
  // Empty and singleton cells are never split.
  if (view.size() <= 1 || decide_stop(view.size(), u, beta)) return CellOutcome::stop();

  const std::size_t dim = choose_dimension(view.dim(), rng);
  MedianSplit ms = median_split(view, dim);
  CellOutcome out;
  out.split = true;
  out.splits.push_back(ms.record());
  out.eaten.push_back(ms.pivot);
  out.children.push_back(std::move(ms.low));
  out.children.push_back(std::move(ms.high));
  return out;
}

namespace {

TreeConfig snapshot(const RandomizedConfig& config, std::uint64_t seed) {
  return TreeConfig{Algorithm::randomized, std::nullopt, config.beta(), seed};
}

}  // namespace

BuildResult build_randomized_traced(const Dataset& data, const RandomizedConfig& config,
                                    RunOptions options) {
  const double beta = config.beta();
  CellProgram program = [beta](const DataView& view, std::uint64_t seed) {
    return randomized_cell(view, seed, beta);
  };
  CellTask root{DataView::all(data), config.seed(), 0, Algorithm::randomized};
  return run_cells(root, program, SplitMode::binary, snapshot(config, config.seed()), options);
}

PartitionTree build_randomized(const Dataset& data, const RandomizedConfig& config,
                               const RunOptions& options) {
  RunOptions opts = options;
  opts.trace = false;
  return std::move(build_randomized_traced(data, config, opts).tree);
}

std::uint64_t ensemble_member_seed(std::uint64_t seed, std::size_t member) {
  return derive_child_seed(mix64(seed ^ 0x656e73656d626c65ULL), member);
}

std::vector<PartitionTree> build_ensemble(const Dataset& data, const RandomizedConfig& config,
                                          std::size_t trees, const RunOptions& options) {
  if (trees == 0) throw std::invalid_argument("ensemble needs at least one tree");
  std::vector<PartitionTree> out;
  out.reserve(trees);
  for (std::size_t t = 0; t < trees; ++t) {
    RandomizedConfig member(config.beta(), ensemble_member_seed(config.seed(), t));
    out.push_back(build_randomized(data, member, options));
  }
  return out;
}

Label ensemble_classify(std::span<const PartitionTree> trees, std::span<const double> x) {
  std::uint64_t votes1 = 0;
  for (const auto& t : trees) votes1 += t.classify(x);
  return majority_label(trees.size() - votes1, votes1);
}

}  // namespace celltree
