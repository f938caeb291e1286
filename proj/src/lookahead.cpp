#include "celltree/lookahead.hpp"

#include <algorithm>
#include <cmath>

#include "celltree/median_partition.hpp"

namespace celltree {

LookaheadConfig::LookaheadConfig(double alpha, double beta, std::size_t d, std::uint64_t seed)
    : alpha_(alpha), beta_(beta), d_(d), seed_(seed) {
  if (d == 0) throw std::invalid_argument("dimension must be at least 1");
  if (!(alpha > 0.0)) throw AdmissibilityError("lookahead rule requires alpha > 0");
  if (!(beta > 0.0)) throw AdmissibilityError("lookahead rule requires beta > 0");
  if (!(1.0 - static_cast<double>(d) * alpha - 2.0 * beta > 0.0))
    throw AdmissibilityError("lookahead rule requires 1 - d*alpha - 2*beta > 0");
}

LookaheadConfig LookaheadConfig::defaults(std::size_t d, std::uint64_t seed) {
  return LookaheadConfig(0.1, 0.2, d, seed);
}

namespace {

std::uint64_t minority(const LabelCounts& c) noexcept { return std::min(c.count0, c.count1); }

// Sum over the leaves of P_k(view) of min(count0, count1).
std::uint64_t minority_at_depth(const DataView& view, std::size_t k) {
  FullTree tree(view, k);
  std::uint64_t total = 0;
  for (const DataView& leaf : tree.leaves()) total += minority(leaf.counts());
  return total;
}

struct Evaluation {
  LookaheadDecision decision;
  std::optional<LevelSplit> first_level;
};

Evaluation evaluate(const DataView& view, double alpha, double beta) {
  Evaluation ev;
  LookaheadDecision& d = ev.decision;
  const std::uint64_t n = view.size();
  const std::uint64_t own = minority(view.counts());
  d.threshold = std::pow(static_cast<double>(n) + 1.0, -beta);
  d.horizon = k_plus(n, alpha);
  d.error = n == 0 ? 0.0 : static_cast<double>(own) / static_cast<double>(n);
  d.lookahead = d.error;
  if (n == 0 || d.horizon == 0) {
    d.stop = true;
    return ev;
  }
  // The first level of P_{k+}(A) is also the level committed on a split.
  ev.first_level = full_level_split(view);
  std::uint64_t offspring = 0;
  for (const DataView& child : ev.first_level->children)
    offspring += minority_at_depth(child, d.horizon - 1);
  d.lookahead = static_cast<double>(offspring) / static_cast<double>(n);
  const std::uint64_t gap = own > offspring ? own - offspring : offspring - own;
  d.stop = static_cast<double>(gap) / static_cast<double>(n) <= d.threshold;
  return ev;
}

}  // namespace

double empirical_error(const DataView& view) {
  if (view.empty()) return 0.0;
  return static_cast<double>(minority(view.counts())) / static_cast<double>(view.size());
}

std::size_t k_plus(std::uint64_t n, double alpha) {
  const double v = alpha * std::log2(static_cast<double>(n) + 1.0);
  return v <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(v));
}

double lookahead_error(const DataView& view, std::size_t k) {
  if (view.empty()) return 0.0;
  return static_cast<double>(minority_at_depth(view, k)) / static_cast<double>(view.size());
}

LookaheadDecision evaluate_lookahead(const DataView& view, double alpha, double beta) {
  return evaluate(view, alpha, beta).decision;
}

CellOutcome lookahead_cell(const DataView& view, double alpha, double beta) {
  Evaluation ev = evaluate(view, alpha, beta);
  if (ev.decision.stop) return CellOutcome::stop();
  LevelSplit& level = *ev.first_level;
  if (!level.complete())
    throw std::logic_error("committed level has an empty part; cell too small to split");
  CellOutcome out;
  out.split = true;
  for (const auto& c : level.cuts) out.splits.push_back(*c);
  out.eaten = std::move(level.eaten);
  out.children = std::move(level.children);
  return out;
}

BuildResult build_lookahead_traced(const Dataset& data, const LookaheadConfig& config,
                                   RunOptions options) {
  if (data.dim() != config.dim())
    throw std::invalid_argument("lookahead config dimension differs from the data");
  const double alpha = config.alpha();
  const double beta = config.beta();
  CellProgram program = [alpha, beta](const DataView& view, std::uint64_t) {
    return lookahead_cell(view, alpha, beta);
  };
  CellTask root{DataView::all(data), config.seed(), 0, Algorithm::lookahead};
  TreeConfig snapshot{Algorithm::lookahead, alpha, beta, config.seed()};
  return run_cells(root, program, SplitMode::full, snapshot, options);
}

PartitionTree build_lookahead(const Dataset& data, const LookaheadConfig& config,
                              const RunOptions& options) {
  RunOptions opts = options;
  opts.trace = false;
  return std::move(build_lookahead_traced(data, config, opts).tree);
}

}  // namespace celltree
