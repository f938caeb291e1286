#include <gtest/gtest.h>

#include <cmath>

#include "celltree/lookahead.hpp"
#include "celltree/median_partition.hpp"
#include "celltree/randomized.hpp"
#include "celltree/risk_lab.hpp"
#include "support.hpp"

using namespace celltree;

namespace {

// Complete binary tree on [0,1] with dyadic cuts, `height` levels deep.
Node dyadic(double lo, double hi, std::size_t height) {
  if (height == 0) return Node(Leaf{{1, 0}});
  const double mid = 0.5 * (lo + hi);
  Internal in;
  in.splits = {{0, mid}};
  in.eaten = {0};
  in.children = {dyadic(lo, mid, height - 1), dyadic(mid, hi, height - 1)};
  return Node(std::move(in));
}

// Midpoint rule over [0,1]^d on a regular grid; d <= 2 only.
double quadrature_bayes_risk(const SyntheticDistribution& dist, std::size_t steps) {
  const std::size_t d = dist.dim();
  double total = 0.0;
  std::vector<double> x(d);
  const std::size_t cells = d == 1 ? steps : steps * steps;
  for (std::size_t c = 0; c < cells; ++c) {
    x[0] = (static_cast<double>(c % steps) + 0.5) / static_cast<double>(steps);
    if (d == 2) x[1] = (static_cast<double>(c / steps) + 0.5) / static_cast<double>(steps);
    const double e = dist.eta(x);
    total += std::min(e, 1.0 - e);
  }
  return total / static_cast<double>(cells);
}

}  // namespace

TEST(Distributions, Catalog) {
  EXPECT_EQ(builtin_distributions(), (std::vector<std::string>{"D-CONST", "D-LIN", "D-CHECKER"}));
  EXPECT_THROW(make_distribution("D-NOPE"), UnknownDistribution);
  EXPECT_THROW(make_distribution("D-CHECKER", {3, 0.5}), std::invalid_argument);
  EXPECT_THROW(make_distribution("D-CONST", {2, 1.5}), std::invalid_argument);
}

TEST(Distributions, ClosedFormBayesRisk) {
  EXPECT_EQ(make_distribution("D-CONST", {2, 0.5}).bayes_risk(), 0.5);
  EXPECT_EQ(make_distribution("D-CONST", {1, 0.2}).bayes_risk(), 0.2);
  const auto lin = make_distribution("D-LIN", {1, 0.5});
  EXPECT_EQ(lin.bayes_risk(), 0.25);
  EXPECT_NEAR(quadrature_bayes_risk(lin, 100000), 0.25, 1e-9);
  const auto lin2 = make_distribution("D-LIN", {2, 0.5});
  EXPECT_NEAR(quadrature_bayes_risk(lin2, 1000), 0.25, 1e-6);
  const auto checker = make_distribution("D-CHECKER", {2, 0.5});
  EXPECT_EQ(checker.bayes_risk(), 0.1);
  EXPECT_NEAR(quadrature_bayes_risk(checker, 1000), 0.1, 1e-9);
}

TEST(Distributions, CheckerMonteCarlo) {
  const auto checker = make_distribution("D-CHECKER");
  CellStream rng(3);
  double acc = 0.0;
  const int m = 100000;
  double x[2];
  for (int i = 0; i < m; ++i) {
    x[0] = rng.uniform01();
    x[1] = rng.uniform01();
    const double e = checker.eta(x);
    acc += std::min(e, 1.0 - e);
  }
  EXPECT_NEAR(acc / m, 0.1, 1e-12);
}

TEST(Distributions, SamplesAreReproducibleAndInCube) {
  const auto lin = make_distribution("D-LIN", {3, 0.5});
  Dataset a = lin.sample(1000, 42);
  Dataset b = lin.sample(1000, 42);
  EXPECT_EQ(fingerprint(DataView::all(a)), fingerprint(DataView::all(b)));
  for (double v : a.coords()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  // Label frequency tracks eta.
  double ones = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ones += a.y(i);
  EXPECT_NEAR(ones / 1000.0, 0.5, 0.05);
}

TEST(BayesClassify, Examples) {
  const auto lin = make_distribution("D-LIN", {1, 0.5});
  const double hi[] = {0.7};
  const double tie[] = {0.5};
  EXPECT_EQ(bayes_classify(lin, hi), 1);
  EXPECT_EQ(bayes_classify(lin, tie), 0);
  const auto checker = make_distribution("D-CHECKER");
  const double low_cell[] = {0.2, 0.3};
  EXPECT_EQ(bayes_classify(checker, low_cell), 0);
}

TEST(EmpiricalRisk, BayesOnConstant) {
  const auto dist = make_distribution("D-CONST", {2, 0.5});
  auto est = empirical_risk([&](std::span<const double> x) { return bayes_classify(dist, x); },
                            dist, 100000, 1);
  EXPECT_NEAR(est.mean, 0.5, 3 * 0.0016);
  EXPECT_NEAR(est.std_error, 0.0016, 0.0001);
  EXPECT_EQ(est.m, 100000u);
}

TEST(EmpiricalRisk, ConstantZeroOnChecker) {
  const auto dist = make_distribution("D-CHECKER");
  auto est = empirical_risk([](std::span<const double>) { return Label{0}; }, dist, 100000, 2);
  EXPECT_NEAR(est.mean, 0.5, 3 * est.std_error);
}

TEST(EmpiricalRisk, BayesOnLinear) {
  const auto dist = make_distribution("D-LIN", {2, 0.5});
  auto est = empirical_risk([&](std::span<const double> x) { return bayes_classify(dist, x); },
                            dist, 100000, 3);
  EXPECT_NEAR(est.mean, 0.25, 3 * est.std_error);
}

TEST(EmpiricalRisk, WorkerCountDoesNotChangeResult) {
  const auto dist = make_distribution("D-LIN", {2, 0.5});
  auto clf = [&](std::span<const double> x) { return bayes_classify(dist, x); };
  auto one = empirical_risk(clf, dist, 50000, 4, 1);
  auto four = empirical_risk(clf, dist, 50000, 4, 4);
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_EQ(one.std_error, four.std_error);
}

TEST(EmpiricalRisk, BayesIsOptimalAtMcResolution) {
  for (const std::string name : {"D-LIN", "D-CHECKER", "D-CONST"}) {
    const auto dist = make_distribution(name, {2, 0.3});
    Dataset train = dist.sample(4000, 5);
    PartitionTree tree = build_randomized(train, RandomizedConfig(0.5, 5));
    auto bayes = empirical_risk([&](std::span<const double> x) { return bayes_classify(dist, x); },
                                dist, 50000, 6);
    auto learned = empirical_risk([&](std::span<const double> x) { return tree.classify(x); },
                                  dist, 50000, 6);
    const double se = std::hypot(bayes.std_error, learned.std_error);
    EXPECT_LE(bayes.mean, learned.mean + 3 * se) << name;
  }
}

TEST(DatasetRisk, CountsMistakes) {
  Dataset ds(1, {0.1, 0.9, 0.8, 0.2}, {0, 1, 0, 0});
  auto est = dataset_risk([](std::span<const double> x) { return Label(x[0] > 0.5); }, ds);
  EXPECT_DOUBLE_EQ(est.mean, 0.25);
}

TEST(CellBayesRisk, ClosedFormOnLinearStrip) {
  // On [0.6, 0.8] x [0,1], eta = x1 has mean 0.7, so L*(A) = 0.3.
  const auto dist = make_distribution("D-LIN", {2, 0.5});
  CellStream rng(8);
  const double lo[] = {0.6, 0.0};
  const double hi[] = {0.8, 1.0};
  EXPECT_NEAR(estimate_cell_bayes_risk(dist, lo, hi, rng), 0.3, 0.03);
}

TEST(LevelRisk, RootLevelOfLinear) {
  const auto dist = make_distribution("D-LIN", {2, 0.5});
  auto est = estimate_level_risk(dist, 1000, 0, 3, 9);
  EXPECT_NEAR(est.mean, 0.5, 0.02);
  EXPECT_NEAR(psi(est, dist), 0.25, 0.02);
}

TEST(LevelRisk, ConstantEtaIsFlat) {
  const auto dist = make_distribution("D-CONST", {2, 0.3});
  for (std::size_t k = 0; k <= 3; ++k) {
    auto est = estimate_level_risk(dist, 5000, k, 2, 10 + k, 500);
    EXPECT_NEAR(est.mean, 0.3, 1e-12) << "k=" << k;
  }
}

TEST(LevelRisk, NonincreasingInLevel) {
  for (const std::string name : {"D-LIN", "D-CHECKER", "D-CONST"}) {
    const auto dist = make_distribution(name, {2, 0.5});
    std::vector<LevelRiskEstimate> levels;
    for (std::size_t k = 0; k <= 3; ++k) levels.push_back(estimate_level_risk(dist, 20000, k, 4, 11, 1000));
    for (std::size_t k = 1; k < levels.size(); ++k) {
      const double se = std::hypot(levels[k].std_error, levels[k - 1].std_error);
      EXPECT_LE(levels[k].mean, levels[k - 1].mean + 3 * se + 1e-12) << name << " k=" << k;
    }
    EXPECT_GE(levels.back().mean, dist.bayes_risk() - 0.02) << name;
  }
}

TEST(LevelRisk, NeedsEnoughData) {
  const auto dist = make_distribution("D-LIN", {2, 0.5});
  EXPECT_THROW(estimate_level_risk(dist, 15, 2, 1, 0), std::invalid_argument);
}

TEST(DepthProfile, SingleLeafAndCompleteTree) {
  const auto dist = make_distribution("D-LIN", {1, 0.5});
  PartitionTree leaf(Node(Leaf{{3, 4}}), 1, SplitMode::binary, {}, 7);
  auto h0 = depth_profile(leaf, dist, 1000, 1);
  ASSERT_EQ(h0.size(), 1u);
  EXPECT_EQ(h0[0], 1000u);

  Node root = dyadic(0.0, 1.0, 3);
  PartitionTree full(root, 1, SplitMode::binary, {}, 8 + 7);
  auto h3 = depth_profile(full, dist, 1000, 2);
  ASSERT_EQ(h3.size(), 4u);
  EXPECT_EQ(h3[3], 1000u);
}

TEST(BetaMass, LowChildMassMean) {
  // A single median split of n = 101 uniform points; the low child covers [0, X_(51)).
  const auto dist = make_distribution("D-LIN", {1, 0.5});
  double sum = 0.0, sum2 = 0.0;
  const int seeds = 500;
  for (int s = 0; s < seeds; ++s) {
    Dataset ds = dist.sample(101, 1000 + s);
    const double mass = median_split(DataView::all(ds), 0).threshold;
    sum += mass;
    sum2 += mass * mass;
  }
  const double mean = sum / seeds;
  const double se = std::sqrt((sum2 / seeds - mean * mean) / (seeds - 1));
  EXPECT_NEAR(mean, 51.0 / 102.0, 3 * se);
}
