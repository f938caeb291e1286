#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace celltree {

using Label = std::uint8_t;
using PointIndex = std::uint32_t;

/// One observation (x, y) with x in R^d and y in {0, 1}.
struct LabeledPoint {
  std::vector<double> x;
  Label y = 0;
};

/// Raised by load_csv; carries the 1-based line number of the offending row.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct LabelCounts {
  std::uint64_t count0 = 0;
  std::uint64_t count1 = 0;

  std::uint64_t total() const noexcept { return count0 + count1; }
  friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

/// Majority vote with ties (and the empty cell) going to class 0.
constexpr Label majority_label(std::uint64_t count0, std::uint64_t count1) noexcept {
  return count1 > count0 ? Label{1} : Label{0};
}

constexpr Label majority_label(const LabelCounts& c) noexcept {
  return majority_label(c.count0, c.count1);
}

/// The sample D_n, stored row-major. Immutable after construction.
class Dataset {
 public:
  explicit Dataset(std::size_t d);
  Dataset(std::size_t d, std::vector<double> coords, std::vector<Label> labels);
  explicit Dataset(std::span<const LabeledPoint> points);

  std::size_t dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  std::span<const double> x(std::size_t i) const noexcept {
    return {coords_.data() + i * d_, d_};
  }
  double x(std::size_t i, std::size_t dim) const noexcept { return coords_[i * d_ + dim]; }
  Label y(std::size_t i) const noexcept { return labels_[i]; }

  LabeledPoint point(std::size_t i) const;
  std::span<const double> coords() const noexcept { return coords_; }
  std::span<const Label> labels() const noexcept { return labels_; }

 private:
  std::size_t d_;
  std::vector<double> coords_;
  std::vector<Label> labels_;
};

/// An index list over a dataset: the data transmitted to one cell.
///
/// Member indices are kept in ascending order so that two views holding the
/// same members compare equal and fingerprint identically.
class DataView {
 public:
  /// All points of `data`.
  static DataView all(const Dataset& data);

  /// Checks that indices are in range, strictly ascending (hence distinct).
  DataView(const Dataset& data, std::vector<PointIndex> indices);

  const Dataset& dataset() const noexcept { return *data_; }
  std::size_t dim() const noexcept { return data_->dim(); }
  std::size_t size() const noexcept { return index_.size(); }
  bool empty() const noexcept { return index_.empty(); }

  std::span<const PointIndex> indices() const noexcept { return index_; }
  PointIndex index(std::size_t k) const noexcept { return index_[k]; }
  double x(std::size_t k, std::size_t dim) const noexcept { return data_->x(index_[k], dim); }
  Label y(std::size_t k) const noexcept { return data_->y(index_[k]); }

  LabelCounts counts() const noexcept;

  /// A view over the same dataset; `indices` must be ascending.
  DataView subview(std::vector<PointIndex> indices) const;

  /// Empty view over the same dataset.
  DataView empty_like() const { return DataView(*data_, {}, unchecked_tag{}); }

  friend bool operator==(const DataView& a, const DataView& b) noexcept {
    return a.data_ == b.data_ && a.index_ == b.index_;
  }

 private:
  struct unchecked_tag {};
  DataView(const Dataset& data, std::vector<PointIndex> indices, unchecked_tag) noexcept
      : data_(&data), index_(std::move(indices)) {}

  const Dataset* data_;
  std::vector<PointIndex> index_;
};

/// Copies the members of `view` into a fresh dataset, preserving their
/// relative order. The result carries no trace of the points outside the view.
Dataset isolate(const DataView& view);

/// Dataset indices of `view` ordered by (coordinate `dim`, dataset index).
/// `dim` is 0-based.
std::vector<PointIndex> strict_rank(const DataView& view, std::size_t dim);

/// 64-bit content fingerprint of the view's members (coordinates and labels,
/// in ascending index order). Independent of the dataset the view lives in.
std::uint64_t fingerprint(const DataView& view);

/// Parses a CSV file: d feature columns followed by a 0/1 label column.
/// A first row that does not parse as numbers is treated as a header.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::string_view text);

/// Writes `data` in the format load_csv accepts, with a header row.
void write_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace celltree
