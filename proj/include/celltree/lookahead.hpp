#pragma once

#include <cstddef>
#include <cstdint>

#include "celltree/cell_runtime.hpp"
#include "celltree/dataset.hpp"
#include "celltree/randomized.hpp"
#include "celltree/tree.hpp"

namespace celltree {

/// Parameters of the bounded-lookahead rule. Construction enforces
/// alpha > 0, beta > 0 and 1 - d*alpha - 2*beta > 0.
class LookaheadConfig {
 public:
  LookaheadConfig(double alpha, double beta, std::size_t d, std::uint64_t seed = 0);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  std::size_t dim() const noexcept { return d_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Defaults used by the command-line tool: alpha = 0.1, beta = 0.2.
  static LookaheadConfig defaults(std::size_t d, std::uint64_t seed = 0);

 private:
  double alpha_;
  double beta_;
  std::size_t d_;
  std::uint64_t seed_;
};

/// In-cell majority-vote error min(count0, count1) / N, with 0/0 = 0.
double empirical_error(const DataView& view);

/// floor(alpha * log2(n + 1)).
std::size_t k_plus(std::uint64_t n, double alpha);

/// N-weighted error of the majority votes over the leaves of the full
/// 2^d-ary median tree of height k rooted at the view.
double lookahead_error(const DataView& view, std::size_t k);

struct LookaheadDecision {
  bool stop = true;
  std::size_t horizon = 0;   // k+
  double error = 0.0;        // empirical_error
  double lookahead = 0.0;    // lookahead_error at the horizon
  double threshold = 1.0;    // (N + 1)^-beta
};

/// Evaluates the stopping rule on one cell.
LookaheadDecision evaluate_lookahead(const DataView& view, double alpha, double beta);

inline bool decide_stop_lookahead(const DataView& view, const LookaheadConfig& config) {
  return evaluate_lookahead(view, config.alpha(), config.beta()).stop;
}

/// The cell rule: stop, or commit one full 2^d-ary level.
CellOutcome lookahead_cell(const DataView& view, double alpha, double beta);

PartitionTree build_lookahead(const Dataset& data, const LookaheadConfig& config,
                              const RunOptions& options = {});

BuildResult build_lookahead_traced(const Dataset& data, const LookaheadConfig& config,
                                   RunOptions options = {});

}  // namespace celltree
