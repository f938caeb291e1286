#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "celltree/lookahead.hpp"
#include "celltree/median_partition.hpp"
#include "naive_lookahead.hpp"
#include "support.hpp"

using namespace celltree;

namespace {

std::vector<std::size_t> every(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST(EmpiricalError, Examples) {
  Dataset a(1, {0.1, 0.2, 0.3, 0.4, 0.5}, {0, 0, 1, 1, 1});
  EXPECT_DOUBLE_EQ(empirical_error(DataView::all(a)), 0.4);
  EXPECT_EQ(empirical_error(DataView::all(Dataset(1))), 0.0);
  Dataset b(1, {0, 1, 2, 3, 4, 5, 6, 7}, {0, 1, 0, 1, 0, 1, 0, 1});
  EXPECT_DOUBLE_EQ(empirical_error(DataView::all(b)), 0.5);
}

TEST(KPlus, Examples) {
  EXPECT_EQ(k_plus(0, 0.1), 0u);
  EXPECT_EQ(k_plus(1023, 0.3), 3u);
  EXPECT_EQ(k_plus(1023, 0.1), 1u);
}

TEST(KPlus, MatchesCountingOracle) {
  for (double alpha : {0.05, 0.1, 0.15, 0.2, 0.3, 0.45}) {
    for (std::uint64_t n = 0; n < 70000; n += 1 + n / 50)
      ASSERT_EQ(k_plus(n, alpha), naive::horizon(n, alpha)) << "n=" << n << " alpha=" << alpha;
  }
}

TEST(LookaheadError, TenPointExample) {
  // Pivot is x=0.4; low holds one 1 and three 0s, high holds two 1s and three 0s.
  Dataset ds(1, {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9},
             {1, 0, 0, 0, 1, 1, 1, 0, 0, 0});
  EXPECT_NEAR(lookahead_error(DataView::all(ds), 1), 0.30, 1e-15);
  EXPECT_DOUBLE_EQ(lookahead_error(DataView::all(ds), 0), empirical_error(DataView::all(ds)));
}

TEST(LookaheadError, PureLabelsGiveZero) {
  Dataset ds = testing_support::random_dataset(300, 2, 5);
  std::vector<double> coords(ds.coords().begin(), ds.coords().end());
  Dataset pure(2, coords, std::vector<Label>(300, 1));
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(lookahead_error(DataView::all(pure), k), 0.0);
  EXPECT_EQ(lookahead_error(DataView::all(Dataset(3)), 2), 0.0);
}

TEST(LookaheadError, MatchesNaiveFormula) {
  for (std::uint64_t s = 0; s < 80; ++s) {
    const std::size_t d = 1 + s % 3;
    const std::size_t n = 1 + mix64(s) % 300;
    Dataset ds = testing_support::random_dataset(n, d, s, s % 2 ? 5 : 0);
    for (std::size_t k = 0; k <= 2; ++k) {
      ASSERT_NEAR(lookahead_error(DataView::all(ds), k), naive::lookahead(ds, every(n), k), 1e-12);
    }
  }
}

TEST(LookaheadError, GainBoundedByEatenMass) {
  // L(A,k) <= L(A) + 2^{dk}/N and L(A,k') <= L(A,k) + 2^{dk'}/N for k <= k'.
  for (std::uint64_t s = 0; s < 120; ++s) {
    const std::size_t d = 1 + s % 3;
    const std::size_t n = 1 + mix64(s + 1000) % 800;
    Dataset ds = s % 2 ? testing_support::random_dataset(n, d, s, 4)
                       : testing_support::signal_dataset(n, d, s);
    const DataView all = DataView::all(ds);
    const double base = empirical_error(all);
    const double N = static_cast<double>(n);
    for (std::size_t k = 0; k <= 3 && d * k < 10; ++k) {
      const double lk = lookahead_error(all, k);
      ASSERT_LE(lk, base + std::ldexp(1.0, static_cast<int>(d * k)) / N);
      for (std::size_t k2 = k; k2 <= 3 && d * k2 < 10; ++k2) {
        ASSERT_LE(lookahead_error(all, k2), lk + std::ldexp(1.0, static_cast<int>(d * k2)) / N);
      }
    }
  }
}

TEST(DecideStop, SmallHorizonStops) {
  // k+ = 0 while alpha*log2(N+1) < 1.
  Dataset ds = testing_support::random_dataset(500, 1, 3);
  LookaheadConfig cfg(0.1, 0.2, 1);
  EXPECT_TRUE(decide_stop_lookahead(DataView::all(ds), cfg));
  EXPECT_TRUE(decide_stop_lookahead(DataView::all(Dataset(1)), cfg));
}

TEST(DecideStop, PureViewStops) {
  std::vector<double> coords(4000);
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = static_cast<double>(i % 97);
  Dataset ds(2, coords, std::vector<Label>(2000, 0));
  auto dec = evaluate_lookahead(DataView::all(ds), 0.2, 0.2);
  EXPECT_GT(dec.horizon, 0u);
  EXPECT_TRUE(dec.stop);
  EXPECT_EQ(dec.error, 0.0);
  EXPECT_EQ(dec.lookahead, 0.0);
}

TEST(DecideStop, AgreesWithNaive) {
  for (std::uint64_t s = 0; s < 150; ++s) {
    const std::size_t d = 1 + s % 2;
    const std::size_t n = 1 + mix64(s) % 400;
    Dataset ds = testing_support::signal_dataset(n, d, s, s % 3 ? 0 : 6);
    auto dec = evaluate_lookahead(DataView::all(ds), 0.2, 0.2);
    ASSERT_EQ(dec.stop, naive::stops(ds, every(n), 0.2, 0.2)) << "seed " << s;
    ASSERT_EQ(dec.horizon, naive::horizon(n, 0.2));
  }
}

TEST(LookaheadConfig, Admissibility) {
  EXPECT_NO_THROW(LookaheadConfig(0.1, 0.2, 2));
  EXPECT_THROW(LookaheadConfig(0.3, 0.3, 2), AdmissibilityError);
  EXPECT_THROW(LookaheadConfig(0.25, 0.25, 2), AdmissibilityError);  // exactly zero
  EXPECT_THROW(LookaheadConfig(0.0, 0.2, 2), AdmissibilityError);
  EXPECT_THROW(LookaheadConfig(0.1, 0.0, 2), AdmissibilityError);
  EXPECT_EQ(LookaheadConfig::defaults(2).alpha(), 0.1);
}

TEST(BuildLookahead, AllZeroLabelsIsSingleLeaf) {
  Dataset noise = testing_support::random_dataset(3000, 2, 4);
  std::vector<double> coords(noise.coords().begin(), noise.coords().end());
  Dataset ds(2, coords, std::vector<Label>(3000, 0));
  PartitionTree t = build_lookahead(ds, LookaheadConfig(0.2, 0.2, 2));
  ASSERT_TRUE(t.root().is_leaf());
  const double x[] = {0.3, 0.3};
  EXPECT_EQ(t.classify(x), 0);
}

TEST(BuildLookahead, BelowHorizonIsSingleLeaf) {
  // 2^{1/0.1} - 1 = 1023.
  Dataset ds = testing_support::signal_dataset(1021, 1, 2);
  EXPECT_TRUE(build_lookahead(ds, LookaheadConfig(0.1, 0.2, 1)).root().is_leaf());
}

TEST(BuildLookahead, SeparableDataSplitsRoot) {
  CellStream rng(200);
  std::vector<double> xs(200);
  for (auto& v : xs) v = rng.uniform01();
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const double med = sorted[99];
  std::vector<Label> ys;
  for (double v : xs) ys.push_back(v > med ? 1 : 0);
  Dataset ds(1, xs, ys);
  EXPECT_FALSE(naive::stops(ds, every(200), 0.4, 0.25));
  PartitionTree t = build_lookahead(ds, LookaheadConfig(0.4, 0.25, 1));
  EXPECT_FALSE(t.root().is_leaf());
  auto dec = evaluate_lookahead(DataView::all(ds), 0.4, 0.25);
  EXPECT_NEAR(dec.threshold, 0.2655834362038789, 1e-12);
  EXPECT_GT(std::fabs(dec.error - dec.lookahead), dec.threshold);
}

TEST(BuildLookahead, NodeForNodeAgainstNaive) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const std::size_t d = 1 + s % 2;
    const std::size_t n = 1 + mix64(s + 17) % 200;
    Dataset ds = testing_support::step_dataset(n, d, s, 0.1, s % 4 == 0 ? 5 : 0);
    const double alpha = d == 1 ? 0.4 : 0.2;
    const double beta = 0.25;
    PartitionTree t = build_lookahead(ds, LookaheadConfig(alpha, beta, d));
    std::string why;
    ASSERT_TRUE(naive::same_tree(naive::build(ds, alpha, beta), t.root(), why))
        << "seed " << s << ": " << why;
    EXPECT_TRUE(t.conserves());
  }
}

TEST(BuildLookahead, DimensionMismatchRejected) {
  Dataset ds = testing_support::random_dataset(10, 3, 1);
  EXPECT_THROW(build_lookahead(ds, LookaheadConfig(0.1, 0.2, 2)), std::invalid_argument);
}

TEST(BuildLookahead, GrowsOnSignal) {
  Dataset ds = testing_support::signal_dataset(20000, 2, 13);
  PartitionTree t = build_lookahead(ds, LookaheadConfig(0.1, 0.2, 2));
  EXPECT_FALSE(t.root().is_leaf());
  EXPECT_EQ(t.mode(), SplitMode::full);
  EXPECT_TRUE(t.conserves());
}
