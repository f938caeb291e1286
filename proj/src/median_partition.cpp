#include "celltree/median_partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace celltree {

MedianSplit median_split(const DataView& view, std::size_t dim) {
  if (view.empty()) throw std::invalid_argument("median split of an empty view");
  if (dim >= view.dim()) throw std::out_of_range("median split dimension out of range");

  const Dataset& data = view.dataset();
  const std::size_t n = view.size();
  const std::size_t r = (n + 1) / 2;  // 1-based rank of the pivot

  auto less = [&](PointIndex a, PointIndex b) {
    const double va = data.x(a, dim);
    const double vb = data.x(b, dim);
    return va < vb || (va == vb && a < b);
  };

  std::vector<PointIndex> scratch(view.indices().begin(), view.indices().end());
  std::nth_element(scratch.begin(), scratch.begin() + (r - 1), scratch.end(), less);
  const PointIndex pivot = scratch[r - 1];

  // Partition against the pivot while keeping ascending index order.
  std::vector<PointIndex> low;
  std::vector<PointIndex> high;
  low.reserve(r - 1);
  high.reserve(n - r);
  for (PointIndex i : view.indices()) {
    if (i == pivot) continue;
    (less(i, pivot) ? low : high).push_back(i);
  }

  MedianSplit out{dim, pivot, data.x(pivot, dim), view.empty_like(), view.empty_like()};
  out.low = view.subview(std::move(low));
  out.high = view.subview(std::move(high));
  return out;
}

bool LevelSplit::complete() const noexcept {
  return std::all_of(cuts.begin(), cuts.end(), [](const auto& c) { return c.has_value(); });
}

LevelSplit full_level_split(const DataView& view) {
  const std::size_t d = view.dim();
  if (d >= 16) throw std::invalid_argument("full level split supports d < 16");
  const std::size_t arity = std::size_t{1} << d;
  const std::size_t cuts = arity - 1;

  // Heap of parts: part i is cut in dimension floor(log2(i + 1)).
  std::vector<DataView> parts(2 * arity - 1, view.empty_like());
  parts[0] = view;
  LevelSplit out;
  out.cuts.resize(cuts);
  std::size_t level_start = 0;
  for (std::size_t dim = 0; dim < d; ++dim) {
    const std::size_t level_size = std::size_t{1} << dim;
    for (std::size_t i = level_start; i < level_start + level_size; ++i) {
      if (parts[i].empty()) continue;
      MedianSplit ms = median_split(parts[i], dim);
      out.cuts[i] = ms.record();
      out.eaten.push_back(ms.pivot);
      parts[2 * i + 1] = std::move(ms.low);
      parts[2 * i + 2] = std::move(ms.high);
    }
    level_start += level_size;
  }
  out.children.assign(std::make_move_iterator(parts.begin() + cuts),
                      std::make_move_iterator(parts.end()));
  return out;
}

FullTree::FullTree(const DataView& root, std::size_t k)
    : d_(root.dim()), k_(k), root_size_(root.size()) {
  if (d_ * k_ >= 30) throw std::invalid_argument("full tree too large (d * k must be < 30)");
  leaves_.push_back(root);
  for (std::size_t level = 0; level < k_; ++level) {
    std::vector<DataView> next;
    next.reserve(leaves_.size() << d_);
    for (const DataView& v : leaves_) {
      LevelSplit ls = full_level_split(v);
      eaten_ += ls.eaten.size();
      cuts_.push_back(std::move(ls.cuts));
      for (auto& c : ls.children) next.push_back(std::move(c));
    }
    leaves_ = std::move(next);
  }
}

namespace {

// Position inside one level node's cut heap -> child ordinal, following x.
std::size_t descend(std::span<const std::optional<SplitRecord>> cuts, std::span<const double> x) {
  std::size_t pos = 0;
  while (pos < cuts.size()) {
    const auto& c = cuts[pos];
    const bool low = !c || c->goes_low(x);
    pos = 2 * pos + (low ? 1 : 2);
  }
  return pos - cuts.size();
}

}  // namespace

std::size_t FullTree::locate(std::span<const double> x) const {
  if (x.size() != d_) throw std::invalid_argument("query point has wrong dimension");
  const std::size_t arity = std::size_t{1} << d_;
  std::size_t node = 0;  // breadth-first index among level nodes
  for (std::size_t level = 0; level < k_; ++level) {
    node = node * arity + 1 + descend(cuts_[node], x);
  }
  // Level nodes before the leaf row: (arity^k - 1) / (arity - 1).
  return node - cuts_.size();
}

FullTree::Box FullTree::leaf_box(std::size_t leaf) const {
  if (leaf >= leaves_.size()) throw std::out_of_range("leaf index out of range");
  const std::size_t arity = std::size_t{1} << d_;
  Box box{std::vector<double>(d_, -std::numeric_limits<double>::infinity()),
          std::vector<double>(d_, std::numeric_limits<double>::infinity())};

  // Child ordinals from the root down to the leaf.
  std::vector<std::size_t> path(k_);
  std::size_t rem = leaf;
  for (std::size_t level = k_; level-- > 0;) {
    path[level] = rem % arity;
    rem /= arity;
  }
  std::size_t node = 0;
  for (std::size_t level = 0; level < k_; ++level) {
    const auto& cuts = cuts_[node];
    const std::size_t child = path[level];
    std::size_t pos = 0;
    for (std::size_t j = 0; j < d_; ++j) {
      const bool high = (child >> (d_ - 1 - j)) & 1U;
      if (const auto& c = cuts[pos]) {
        if (high)
          box.lo[c->dim] = std::max(box.lo[c->dim], c->threshold);
        else
          box.hi[c->dim] = std::min(box.hi[c->dim], c->threshold);
      } else if (high) {
        // An absent cut routes everything low; its high side is empty.
        box.lo[j] = std::numeric_limits<double>::infinity();
      }
      pos = 2 * pos + (high ? 2 : 1);
    }
    node = node * arity + 1 + child;
  }
  return box;
}

LeafBounds leaf_bounds(std::uint64_t n, std::size_t k, std::size_t d) {
  if (k == 0) return {n, n};
  const std::size_t shift = d * k;
  if (shift >= 64) return {0, 0};
  const std::uint64_t cells = std::uint64_t{1} << shift;
  const std::uint64_t hi = n / cells;
  const std::uint64_t ceil = n / cells + (n % cells != 0 ? 1 : 0);
  return {ceil >= 2 ? ceil - 2 : 0, hi};
}

}  // namespace celltree
