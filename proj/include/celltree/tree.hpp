#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "celltree/dataset.hpp"

namespace celltree {

/// An axis-aligned cut. `dim` is 0-based; tree documents store it 1-based.
struct SplitRecord {
  std::size_t dim = 0;
  double threshold = 0.0;

  /// Query routing convention: strictly below goes low, equal or above goes high.
  bool goes_low(std::span<const double> x) const noexcept { return x[dim] < threshold; }

  friend bool operator==(const SplitRecord&, const SplitRecord&) = default;
};

enum class SplitMode { binary, full };
enum class Algorithm { randomized, lookahead };

std::string_view to_string(SplitMode mode) noexcept;
std::string_view to_string(Algorithm algo) noexcept;
std::optional<SplitMode> parse_split_mode(std::string_view s) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view s) noexcept;

/// Snapshot of the parameters a tree was grown with.
struct TreeConfig {
  Algorithm algorithm = Algorithm::randomized;
  std::optional<double> alpha;  // lookahead only
  double beta = 0.5;
  std::uint64_t seed = 0;

  friend bool operator==(const TreeConfig&, const TreeConfig&) = default;
};

class Node;

struct Leaf {
  LabelCounts counts;
  friend bool operator==(const Leaf&, const Leaf&) = default;
};

/// One split event. Cuts are stored in heap order: cut 0 splits the cell,
/// cuts 2i+1 and 2i+2 split the low and high parts of cut i, and so on.
/// A binary node has one cut and two children; a full node over d dimensions
/// has 2^d - 1 cuts and 2^d children.
struct Internal {
  std::vector<SplitRecord> splits;
  std::vector<PointIndex> eaten;  // one pivot per cut
  std::vector<Node> children;

  std::size_t child_for(std::span<const double> x) const noexcept;
  friend bool operator==(const Internal&, const Internal&);
};

class Node {
 public:
  Node() = default;
  Node(Leaf leaf) : v_(std::move(leaf)) {}
  Node(Internal internal) : v_(std::move(internal)) {}

  bool is_leaf() const noexcept { return std::holds_alternative<Leaf>(v_); }
  const Leaf& leaf() const { return std::get<Leaf>(v_); }
  Leaf& leaf() { return std::get<Leaf>(v_); }
  const Internal& internal() const { return std::get<Internal>(v_); }
  Internal& internal() { return std::get<Internal>(v_); }

  friend bool operator==(const Node&, const Node&) = default;

 private:
  std::variant<Leaf, Internal> v_;
};

inline bool operator==(const Internal& a, const Internal& b) {
  return a.splits == b.splits && a.eaten == b.eaten && a.children == b.children;
}

struct RouteResult {
  const Leaf* leaf = nullptr;
  std::size_t depth = 0;  // number of split events above the leaf
};

struct TreeStats {
  std::size_t nodes = 0;
  std::size_t leaves = 0;
  std::size_t max_depth = 0;
  std::vector<std::size_t> leaf_depths;  // histogram, index = depth
  std::uint64_t eaten = 0;
  std::uint64_t leaf_points = 0;
};

/// The classifier g_n: a finite partition tree with majority-vote leaves.
class PartitionTree {
 public:
  PartitionTree(Node root, std::size_t d, SplitMode mode, TreeConfig config, std::uint64_t n);

  const Node& root() const noexcept { return root_; }
  std::size_t dim() const noexcept { return d_; }
  SplitMode mode() const noexcept { return mode_; }
  const TreeConfig& config() const noexcept { return config_; }
  /// Sample size the tree was grown from.
  std::uint64_t sample_size() const noexcept { return n_; }

  RouteResult route(std::span<const double> x) const;
  Label classify(std::span<const double> x) const { return majority_label(route(x).leaf->counts); }

  TreeStats stats() const;
  /// Leaf counts plus eaten pivots add up to the sample size.
  bool conserves() const;

  friend bool operator==(const PartitionTree&, const PartitionTree&) = default;

 private:
  Node root_;
  std::size_t d_;
  SplitMode mode_;
  TreeConfig config_;
  std::uint64_t n_;
};

/// Checks the shape rules of one internal node for the given mode and d.
/// Throws std::invalid_argument describing the first violation.
void check_internal_shape(const Internal& node, SplitMode mode, std::size_t d);

// Canonical text form. Objects have sorted keys, numbers use the shortest
// round-tripping representation, so equal trees give equal bytes.

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `manifest`, when given, is recorded as a reference to the run manifest
/// that produced the document.
std::string serialize(const PartitionTree& tree, std::string_view manifest = {});
PartitionTree deserialize(std::string_view text);

std::string serialize_ensemble(std::span<const PartitionTree> trees,
                               std::string_view manifest = {});
/// Accepts either a single tree document or an ensemble document.
std::vector<PartitionTree> deserialize_forest(std::string_view text);

}  // namespace celltree
