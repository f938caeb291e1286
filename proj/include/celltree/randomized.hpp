#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "celltree/cell_runtime.hpp"
#include "celltree/dataset.hpp"
#include "celltree/seed.hpp"
#include "celltree/tree.hpp"

namespace celltree {

/// Raised when parameters fall outside the hypotheses of the consistency
/// results (0 < beta < 1 for the randomized rule, 1 - d*alpha - 2*beta > 0 for
/// the lookahead rule).
class AdmissibilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RandomizedConfig {
 public:
  RandomizedConfig(double beta, std::uint64_t seed);

  double beta() const noexcept { return beta_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  double beta_;
  std::uint64_t seed_;
};

/// Stopping probability: 1 for n < 3, otherwise 1 / (ln n)^beta.
double phi(std::uint64_t n, double beta);

/// Stop iff u <= phi(n, beta).
inline bool decide_stop(std::uint64_t n, double u, double beta) { return u <= phi(n, beta); }

/// Uniform over {0, ..., d - 1}.
inline std::size_t choose_dimension(std::size_t d, CellStream& rng) {
  return static_cast<std::size_t>(rng.below(d));
}

/// The cell rule of the randomized classifier. Draws U, then (if splitting)
/// the cut dimension, from the stream seeded by `seed`.
CellOutcome randomized_cell(const DataView& view, std::uint64_t seed, double beta);

PartitionTree build_randomized(const Dataset& data, const RandomizedConfig& config,
                               const RunOptions& options = {});

BuildResult build_randomized_traced(const Dataset& data, const RandomizedConfig& config,
                                    RunOptions options = {});

/// Seed of ensemble member `member` under a root seed.
std::uint64_t ensemble_member_seed(std::uint64_t seed, std::size_t member);

std::vector<PartitionTree> build_ensemble(const Dataset& data, const RandomizedConfig& config,
                                          std::size_t trees, const RunOptions& options = {});

/// Majority over member votes; ties go to 0.
Label ensemble_classify(std::span<const PartitionTree> trees, std::span<const double> x);

}  // namespace celltree
