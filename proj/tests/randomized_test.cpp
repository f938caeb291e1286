#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "celltree/randomized.hpp"
#include "support.hpp"

using namespace celltree;

TEST(Phi, SmallCellsAlwaysStop) {
  EXPECT_EQ(phi(0, 0.5), 1.0);
  EXPECT_EQ(phi(1, 0.5), 1.0);
  EXPECT_EQ(phi(2, 0.5), 1.0);
}

TEST(Phi, FormulaValues) {
  // Reference values computed independently: (ln n)^-1/2.
  EXPECT_NEAR(phi(3, 0.5), 0.9540645820000013, 1e-12);
  EXPECT_NEAR(phi(1000000, 0.5), 0.2690397993802069, 1e-12);
}

TEST(Phi, NonincreasingInN) {
  for (std::uint64_t n = 3; n < 5000; ++n) ASSERT_LE(phi(n + 1, 0.4), phi(n, 0.4));
}

TEST(DecideStop, Examples) {
  EXPECT_TRUE(decide_stop(2, 0.999, 0.5));
  EXPECT_TRUE(decide_stop(1000000, 0.01, 0.5));
  EXPECT_FALSE(decide_stop(1000000, 0.5, 0.5));
}

TEST(RandomizedConfig, RejectsBetaOutsideUnitInterval) {
  EXPECT_THROW(RandomizedConfig(0.0, 1), AdmissibilityError);
  EXPECT_THROW(RandomizedConfig(1.0, 1), AdmissibilityError);
  EXPECT_NO_THROW(RandomizedConfig(0.5, 1));
}

TEST(ChooseDimension, OneDimension) {
  CellStream rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(choose_dimension(1, rng), 0u);
}

TEST(ChooseDimension, UniformOverFourDims) {
  CellStream rng(2024);
  std::array<double, 4> freq{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) freq[choose_dimension(4, rng)] += 1.0;
  double chi2 = 0.0;
  const double expected = draws / 4.0;
  for (double f : freq) {
    EXPECT_NEAR(f / draws, 0.25, 0.01);
    chi2 += (f - expected) * (f - expected) / expected;
  }
  // 0.999 quantile of chi-square with 3 degrees of freedom.
  EXPECT_LT(chi2, 16.266);
}

TEST(ChooseDimension, SameSeedSameDimension) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    CellStream a(s), b(s);
    EXPECT_EQ(choose_dimension(5, a), choose_dimension(5, b));
  }
}

TEST(BuildRandomized, TinyInputsAreSingleLeaves) {
  for (std::size_t n : {0u, 1u, 2u}) {
    Dataset ds = testing_support::random_dataset(n, 2, n);
    for (std::uint64_t s = 0; s < 20; ++s) {
      PartitionTree t = build_randomized(ds, RandomizedConfig(0.5, s));
      ASSERT_TRUE(t.root().is_leaf());
      EXPECT_EQ(t.root().leaf().counts.total(), n);
    }
  }
}

TEST(BuildRandomized, Reproducible) {
  Dataset ds = testing_support::signal_dataset(100, 2, 77);
  const std::string first = serialize(build_randomized(ds, RandomizedConfig(0.5, 77)));
  for (int run = 0; run < 10; ++run)
    EXPECT_EQ(serialize(build_randomized(ds, RandomizedConfig(0.5, 77))), first);
}

TEST(BuildRandomized, ConservesOnFuzzedData) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t n = mix64(s) % 1500;
    Dataset ds = testing_support::random_dataset(n, 1 + s % 3, s, s % 2 ? 7 : 0);
    PartitionTree t = build_randomized(ds, RandomizedConfig(0.2 + 0.6 * (s % 5) / 4.0, s));
    ASSERT_TRUE(t.conserves()) << "seed " << s;
    EXPECT_EQ(t.stats().eaten + t.stats().leaf_points, n);
  }
}

TEST(BuildRandomized, SplitsBigCellsSometimes) {
  // phi(5000) at beta 0.9 is about 0.16, so most seeds split the root.
  Dataset ds = testing_support::random_dataset(5000, 2, 1);
  int split = 0;
  for (std::uint64_t s = 0; s < 50; ++s)
    split += !build_randomized(ds, RandomizedConfig(0.9, s)).root().is_leaf();
  EXPECT_GT(split, 30);
  EXPECT_LT(split, 50);
}

TEST(Ensemble, SingleMemberMatchesTree) {
  Dataset ds = testing_support::signal_dataset(500, 2, 8);
  auto trees = build_ensemble(ds, RandomizedConfig(0.5, 8), 1);
  CellStream rng(1);
  for (int q = 0; q < 200; ++q) {
    double x[2] = {rng.uniform01(), rng.uniform01()};
    EXPECT_EQ(ensemble_classify(trees, x), trees[0].classify(x));
  }
}

TEST(Ensemble, VoteAndTie) {
  auto leaf = [](LabelCounts c) {
    return PartitionTree(Node(Leaf{c}), 1, SplitMode::binary, {}, c.total());
  };
  const double x[] = {0.5};
  std::vector<PartitionTree> three{leaf({0, 1}), leaf({0, 1}), leaf({1, 0})};
  EXPECT_EQ(ensemble_classify(three, x), 1);
  std::vector<PartitionTree> two{leaf({0, 1}), leaf({1, 0})};
  EXPECT_EQ(ensemble_classify(two, x), 0);
}

TEST(Ensemble, MembersDiffer) {
  Dataset ds = testing_support::signal_dataset(3000, 2, 9);
  auto trees = build_ensemble(ds, RandomizedConfig(0.5, 9), 4);
  int distinct = 0;
  for (std::size_t i = 1; i < trees.size(); ++i) distinct += !(trees[i] == trees[0]);
  EXPECT_GT(distinct, 0);
}
