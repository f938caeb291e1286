#pragma once

// Brute-force reference for the bounded-lookahead classifier. Everything is
// recomputed by direct enumeration over plain index lists: ranks by counting,
// the lookahead error by the literal weighted-sum formula, the horizon by
// counting up. Nothing here calls into the library's partitioning code.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "celltree/dataset.hpp"
#include "celltree/tree.hpp"

namespace naive {

struct Cut {
  std::size_t dim;
  double threshold;
};

struct Node {
  bool leaf = true;
  std::size_t count0 = 0;
  std::size_t count1 = 0;
  std::vector<Cut> cuts;
  std::vector<std::size_t> eaten;
  std::vector<Node> children;
};

struct Split {
  std::size_t pivot;
  double threshold;
  std::vector<std::size_t> low;
  std::vector<std::size_t> high;
};

/// Median cut by rank enumeration: O(N^2).
Split split(const celltree::Dataset& data, const std::vector<std::size_t>& members,
            std::size_t dim);

/// One full level: heap of parts cut in dimension order.
std::vector<std::vector<std::size_t>> level(const celltree::Dataset& data,
                                            const std::vector<std::size_t>& members,
                                            std::vector<Cut>* cuts = nullptr,
                                            std::vector<std::size_t>* eaten = nullptr);

std::vector<std::vector<std::size_t>> leaves(const celltree::Dataset& data,
                                             const std::vector<std::size_t>& members,
                                             std::size_t k);

double error(const celltree::Dataset& data, const std::vector<std::size_t>& members);
double lookahead(const celltree::Dataset& data, const std::vector<std::size_t>& members,
                 std::size_t k);
std::size_t horizon(std::size_t n, double alpha);
bool stops(const celltree::Dataset& data, const std::vector<std::size_t>& members, double alpha,
           double beta);

Node build(const celltree::Dataset& data, double alpha, double beta);

/// Node-for-node comparison; on mismatch returns false and describes where.
bool same_tree(const Node& expected, const celltree::Node& actual, std::string& why,
               const std::string& path = "r");

}  // namespace naive
