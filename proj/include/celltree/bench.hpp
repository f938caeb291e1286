#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "celltree/risk_lab.hpp"
#include "celltree/tree.hpp"

namespace celltree {

struct BenchSpec {
  Algorithm algorithm = Algorithm::lookahead;
  std::string distribution = "D-LIN";
  DistributionParams params;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 1;
  std::uint64_t m = 100000;
  double alpha = 0.1;  // lookahead only
  double beta = 0.2;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// One row of a risk curve. Per-replication rows have reps = 1 and the
/// evaluation standard error of that replication; aggregate rows have the
/// mean over all replications and its standard error (sample standard
/// deviation across replications over sqrt(reps)).
struct CurveRow {
  std::string distribution;
  Algorithm algorithm = Algorithm::lookahead;
  std::optional<double> alpha;
  double beta = 0.0;
  std::size_t n = 0;
  std::size_t reps = 0;
  double mean_risk = 0.0;
  double std_error = 0.0;
  double bayes_risk = 0.0;
  /// "rep:<i>" for per-replication rows, "aggregate" otherwise.
  std::string row;
};

/// Grows one tree per (n, replication) on fresh samples and measures its risk
/// on m fresh draws. Throws AdmissibilityError for inadmissible parameters and
/// std::invalid_argument for an empty grid or reps = 0.
std::vector<CurveRow> run_risk_curve(const BenchSpec& spec);

/// Aggregate rows only, in grid order.
std::vector<CurveRow> aggregate_rows(std::span<const CurveRow> rows);

/// Header plus one line per row:
/// distribution,algorithm,alpha,beta,n,reps,mean_risk,std_error,bayes_risk,row
std::string curve_csv(std::span<const CurveRow> rows);

}  // namespace celltree
