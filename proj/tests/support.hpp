#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "celltree/dataset.hpp"
#include "celltree/seed.hpp"

namespace testing_support {

// Random labelled data. With `grid` > 0 coordinates are drawn from
// {0, 1/grid, ..., 1} so that ties are common.
inline celltree::Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed,
                                        std::size_t grid = 0) {
  celltree::CellStream rng(seed);
  std::vector<double> coords(n * d);
  std::vector<celltree::Label> labels(n);
  for (auto& v : coords) {
    v = grid ? static_cast<double>(rng.below(grid + 1)) / static_cast<double>(grid)
             : rng.uniform01();
  }
  for (auto& y : labels) y = static_cast<celltree::Label>(rng.below(2));
  return celltree::Dataset(d, std::move(coords), std::move(labels));
}

// Labels follow the first coordinate with some noise.
inline celltree::Dataset signal_dataset(std::size_t n, std::size_t d, std::uint64_t seed,
                                        std::size_t grid = 0) {
  celltree::CellStream rng(seed);
  std::vector<double> coords(n * d);
  std::vector<celltree::Label> labels(n);
  for (auto& v : coords) {
    v = grid ? static_cast<double>(rng.below(grid + 1)) / static_cast<double>(grid)
             : rng.uniform01();
  }
  for (std::size_t i = 0; i < n; ++i) labels[i] = rng.uniform01() < coords[i * d] ? 1 : 0;
  return celltree::Dataset(d, std::move(coords), std::move(labels));
}

// Sharp labels: a half-space in d = 1, a 2x2 checkerboard otherwise, with
// each label flipped with probability `noise`.
inline celltree::Dataset step_dataset(std::size_t n, std::size_t d, std::uint64_t seed,
                                      double noise, std::size_t grid = 0) {
  celltree::Dataset base = random_dataset(n, d, seed, grid);
  celltree::CellStream rng(~seed);
  std::vector<double> coords(base.coords().begin(), base.coords().end());
  std::vector<celltree::Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool y = coords[i * d] > 0.5;
    if (d > 1) y = y != (coords[i * d + 1] > 0.5);
    if (rng.uniform01() < noise) y = !y;
    labels[i] = y ? 1 : 0;
  }
  return celltree::Dataset(d, std::move(coords), std::move(labels));
}

}  // namespace testing_support
