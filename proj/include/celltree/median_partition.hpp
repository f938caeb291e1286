#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "celltree/dataset.hpp"
#include "celltree/tree.hpp"

namespace celltree {

/// A pivot-eating median cut of one view along one dimension.
///
/// With N = size of the input view and r = floor((N + 1) / 2), the pivot is the
/// r-th smallest member under (coordinate, dataset index) order. Members
/// ranked below it form `low` (N(low) = r - 1), members ranked above it form
/// `high` (N(high) = N - r), and the pivot itself goes to neither side.
struct MedianSplit {
  std::size_t dim = 0;
  PointIndex pivot = 0;
  double threshold = 0.0;
  DataView low;
  DataView high;

  SplitRecord record() const noexcept { return {dim, threshold}; }
};

/// Throws std::invalid_argument for an empty view.
MedianSplit median_split(const DataView& view, std::size_t dim);

/// One full 2^d-ary level: a median cut in dimension 1, then each half in
/// dimension 2, and so on through dimension d.
struct LevelSplit {
  /// 2^d views in canonical order: child c takes the low side of the cut in
  /// dimension j iff bit (d - 1 - j) of c is clear.
  std::vector<DataView> children;
  /// 2^d - 1 cuts in heap order; empty where the part being cut had no points.
  std::vector<std::optional<SplitRecord>> cuts;
  std::vector<PointIndex> eaten;

  bool complete() const noexcept;
};

LevelSplit full_level_split(const DataView& view);

/// The full 2^d-ary median tree of height k rooted at a view (P_k(A)).
///
/// The tree is scratch structure: views plus the cuts needed to locate a query
/// point. A cut that is absent (its part had no points) sends every query to
/// its low side.
class FullTree {
 public:
  FullTree(const DataView& root, std::size_t k);

  std::size_t dim() const noexcept { return d_; }
  std::size_t height() const noexcept { return k_; }
  std::size_t root_size() const noexcept { return root_size_; }

  /// 2^{dk} leaf views in canonical order.
  std::span<const DataView> leaves() const noexcept { return leaves_; }
  std::uint64_t eaten() const noexcept { return eaten_; }

  /// Index of the leaf region containing x.
  std::size_t locate(std::span<const double> x) const;

  struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
  };
  /// Bounds of leaf `leaf` as an (open) axis-aligned box, possibly infinite.
  Box leaf_box(std::size_t leaf) const;

 private:
  std::size_t d_;
  std::size_t k_;
  std::size_t root_size_;
  std::vector<DataView> leaves_;
  // Per internal level node, in breadth-first order: its 2^d - 1 cuts.
  std::vector<std::vector<std::optional<SplitRecord>>> cuts_;
  std::uint64_t eaten_ = 0;
};

inline FullTree build_full_tree(const DataView& view, std::size_t k) { return FullTree(view, k); }

struct LeafBounds {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  friend bool operator==(const LeafBounds&, const LeafBounds&) = default;
};

/// Integer form of the leaf-size sandwich n/2^{dk} - 2 <= N(leaf) <= n/2^{dk}:
/// lo = max(ceil(n / 2^{dk}) - 2, 0), hi = floor(n / 2^{dk}); (n, n) for k = 0.
LeafBounds leaf_bounds(std::uint64_t n, std::size_t k, std::size_t d);

}  // namespace celltree
