#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "celltree/dataset.hpp"
#include "celltree/seed.hpp"
#include "celltree/tree.hpp"

namespace celltree {

/// A distribution of (X, Y) with X uniform on [0,1]^d, a known regression
/// function eta(x) = P{Y = 1 | X = x} and a closed-form Bayes risk.
class SyntheticDistribution {
 public:
  using Eta = std::function<double(std::span<const double>)>;

  SyntheticDistribution(std::string name, std::size_t d, Eta eta, double bayes_risk,
                        std::string support);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return d_; }
  double bayes_risk() const noexcept { return bayes_risk_; }
  const std::string& support() const noexcept { return support_; }

  double eta(std::span<const double> x) const { return eta_(x); }

  /// Draws X into `x` and returns Y.
  Label draw(CellStream& rng, std::span<double> x) const;
  Dataset sample(std::size_t n, std::uint64_t seed) const;

 private:
  std::string name_;
  std::size_t d_;
  Eta eta_;
  double bayes_risk_;
  std::string support_;
};

struct DistributionParams {
  std::size_t d = 2;
  double p = 0.5;  // D-CONST only
};

class UnknownDistribution : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Names accepted by make_distribution: D-CONST, D-LIN, D-CHECKER.
std::vector<std::string> builtin_distributions();

/// D-CONST: eta = p. D-LIN: eta = x_1. D-CHECKER (d = 2 only): eta = 0.9 on the
/// two cells of the 2x2 checkerboard where exactly one coordinate is >= 1/2,
/// 0.1 elsewhere. Throws UnknownDistribution for other names, and
/// std::invalid_argument for parameters the distribution does not support.
SyntheticDistribution make_distribution(std::string_view name, const DistributionParams& params = {});

/// Predicts 1 iff eta(x) > 1/2.
Label bayes_classify(const SyntheticDistribution& dist, std::span<const double> x);

struct RiskEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t m = 0;
};

using Classifier = std::function<Label(std::span<const double>)>;

/// Fraction of m fresh draws the classifier gets wrong, with binomial
/// standard error. Draws are made in fixed-size blocks with derived seeds, so
/// the estimate does not depend on `workers`.
RiskEstimate empirical_risk(const Classifier& classifier, const SyntheticDistribution& dist,
                            std::uint64_t m, std::uint64_t seed, std::size_t workers = 1);

/// Error rate of a classifier on a fixed labelled dataset.
RiskEstimate dataset_risk(const Classifier& classifier, const Dataset& data);

/// L*(A) for an axis-aligned box A, estimated by sampling X conditionally on
/// A until the standard error of the conditional mean of eta is below
/// `target_se` (or `max_draws` is reached).
double estimate_cell_bayes_risk(const SyntheticDistribution& dist, std::span<const double> lo,
                                std::span<const double> hi, CellStream& rng,
                                double target_se = 0.01, std::size_t max_draws = 200000);

struct LevelRiskEstimate {
  double mean = 0.0;       // estimate of L*_k
  double std_error = 0.0;  // across replications
  std::size_t reps = 0;
};

/// L*_k = E[L*(A_k(X))] for the level-k full median tree grown on n points.
/// Requires n >= 2^{dk}; throws std::invalid_argument otherwise.
LevelRiskEstimate estimate_level_risk(const SyntheticDistribution& dist, std::size_t n,
                                      std::size_t k, std::size_t reps, std::uint64_t seed,
                                      std::size_t queries = 2000, std::size_t workers = 1);

/// psi(n, k) = L*_k - L*; a diagnostic only.
inline double psi(const LevelRiskEstimate& level, const SyntheticDistribution& dist) {
  return level.mean - dist.bayes_risk();
}

/// Histogram of route depths K(X) over m draws of X; index = depth.
std::vector<std::uint64_t> depth_profile(const PartitionTree& tree,
                                         const SyntheticDistribution& dist, std::uint64_t m,
                                         std::uint64_t seed);

}  // namespace celltree
