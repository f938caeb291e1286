#include "celltree/tree.hpp"

#include <bit>
#include <nlohmann/json.hpp>

namespace celltree {

using json = nlohmann::json;

std::string_view to_string(SplitMode mode) noexcept {
  return mode == SplitMode::binary ? "binary" : "full";
}

std::string_view to_string(Algorithm algo) noexcept {
  return algo == Algorithm::randomized ? "randomized" : "lookahead";
}

std::optional<SplitMode> parse_split_mode(std::string_view s) noexcept {
  if (s == "binary") return SplitMode::binary;
  if (s == "full") return SplitMode::full;
  return std::nullopt;
}

std::optional<Algorithm> parse_algorithm(std::string_view s) noexcept {
  if (s == "randomized") return Algorithm::randomized;
  if (s == "lookahead") return Algorithm::lookahead;
  return std::nullopt;
}

std::size_t Internal::child_for(std::span<const double> x) const noexcept {
  const std::size_t cuts = splits.size();
  std::size_t pos = 0;
  while (pos < cuts) pos = 2 * pos + (splits[pos].goes_low(x) ? 1 : 2);
  return pos - cuts;
}

void check_internal_shape(const Internal& node, SplitMode mode, std::size_t d) {
  const std::size_t arity = mode == SplitMode::binary ? 2 : (std::size_t{1} << d);
  if (node.children.size() != arity)
    throw std::invalid_argument("internal node has " + std::to_string(node.children.size()) +
                                " children, expected " + std::to_string(arity));
  if (node.splits.size() != arity - 1)
    throw std::invalid_argument("internal node has " + std::to_string(node.splits.size()) +
                                " split records, expected " + std::to_string(arity - 1));
  if (node.eaten.size() != node.splits.size())
    throw std::invalid_argument("eaten pivot count differs from split record count");
  for (std::size_t i = 0; i < node.splits.size(); ++i) {
    const std::size_t dim = node.splits[i].dim;
    if (dim >= d) throw std::invalid_argument("split dimension out of range");
    // Full levels cut dimension 1 first, then 2, ..., in heap order.
    if (mode == SplitMode::full &&
        dim != static_cast<std::size_t>(std::bit_width(i + 1) - 1))
      throw std::invalid_argument("full-level cut out of dimension order");
  }
}

PartitionTree::PartitionTree(Node root, std::size_t d, SplitMode mode, TreeConfig config,
                             std::uint64_t n)
    : root_(std::move(root)), d_(d), mode_(mode), config_(config), n_(n) {
  if (d_ == 0) throw std::invalid_argument("tree dimension must be at least 1");
  if (d_ >= 16 && mode_ == SplitMode::full)
    throw std::invalid_argument("full 2^d-ary mode supports d < 16");
  std::vector<const Node*> stack{&root_};
  while (!stack.empty()) {
    const Node* node = stack.back();
    stack.pop_back();
    if (node->is_leaf()) continue;
    check_internal_shape(node->internal(), mode_, d_);
    for (const Node& c : node->internal().children) stack.push_back(&c);
  }
}

RouteResult PartitionTree::route(std::span<const double> x) const {
  if (x.size() != d_) throw std::invalid_argument("query point has wrong dimension");
  const Node* node = &root_;
  std::size_t depth = 0;
  while (!node->is_leaf()) {
    const Internal& in = node->internal();
    node = &in.children[in.child_for(x)];
    ++depth;
  }
  return {&node->leaf(), depth};
}

TreeStats PartitionTree::stats() const {
  TreeStats s;
  std::vector<std::pair<const Node*, std::size_t>> stack{{&root_, 0}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    ++s.nodes;
    if (node->is_leaf()) {
      ++s.leaves;
      s.leaf_points += node->leaf().counts.total();
      s.max_depth = std::max(s.max_depth, depth);
      if (s.leaf_depths.size() <= depth) s.leaf_depths.resize(depth + 1, 0);
      ++s.leaf_depths[depth];
      continue;
    }
    s.eaten += node->internal().eaten.size();
    for (const Node& c : node->internal().children) stack.emplace_back(&c, depth + 1);
  }
  return s;
}

bool PartitionTree::conserves() const {
  const TreeStats s = stats();
  return s.leaf_points + s.eaten == n_;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::string_view kTreeFormat = "celltree/tree";
constexpr std::string_view kEnsembleFormat = "celltree/ensemble";
constexpr int kVersion = 1;

json node_to_json(const Node& node) {
  if (node.is_leaf()) {
    return json{{"count0", node.leaf().counts.count0}, {"count1", node.leaf().counts.count1}};
  }
  const Internal& in = node.internal();
  json splits = json::array();
  for (const auto& s : in.splits) splits.push_back(json::array({s.dim + 1, s.threshold}));
  json children = json::array();
  for (const auto& c : in.children) children.push_back(node_to_json(c));
  return json{{"splits", std::move(splits)}, {"eaten", in.eaten}, {"children", std::move(children)}};
}

json tree_to_json(const PartitionTree& tree) {
  json config{{"algorithm", to_string(tree.config().algorithm)},
              {"beta", tree.config().beta},
              {"seed", tree.config().seed}};
  if (tree.config().alpha) config["alpha"] = *tree.config().alpha;
  return json{{"format", kTreeFormat},
              {"version", kVersion},
              {"mode", to_string(tree.mode())},
              {"d", tree.dim()},
              {"n", tree.sample_size()},
              {"config", std::move(config)},
              {"root", node_to_json(tree.root())}};
}

[[noreturn]] void fail(const std::string& what) { throw SchemaError(what); }

void expect_keys(const json& j, std::initializer_list<std::string_view> keys, const char* what) {
  if (!j.is_object()) fail(std::string(what) + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      fail(std::string("unexpected key '") + k + "' in " + what);
  }
  for (auto k : keys) {
    if (!j.contains(k)) fail(std::string("missing key '") + std::string(k) + "' in " + what);
  }
}

std::uint64_t get_count(const json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    fail(std::string(what) + " must be a nonnegative integer");
  return j.get<std::uint64_t>();
}

double get_real(const json& j, const char* what) {
  if (!j.is_number()) fail(std::string(what) + " must be a number");
  return j.get<double>();
}

Node node_from_json(const json& j, std::size_t d, SplitMode mode, std::size_t depth) {
  if (depth > 4096) fail("tree too deep");
  if (!j.is_object()) fail("node must be an object");
  if (j.contains("count0") || j.contains("count1")) {
    expect_keys(j, {"count0", "count1"}, "leaf");
    return Leaf{{get_count(j["count0"], "count0"), get_count(j["count1"], "count1")}};
  }
  expect_keys(j, {"splits", "eaten", "children"}, "internal node");
  Internal in;
  if (!j["splits"].is_array()) fail("splits must be an array");
  for (const auto& s : j["splits"]) {
    if (!s.is_array() || s.size() != 2) fail("split record must be [dim, threshold]");
    const std::uint64_t dim = get_count(s[0], "split dim");
    if (dim < 1 || dim > d) fail("split dim out of range 1..d");
    in.splits.push_back({static_cast<std::size_t>(dim - 1), get_real(s[1], "threshold")});
  }
  if (!j["eaten"].is_array()) fail("eaten must be an array");
  for (const auto& e : j["eaten"]) {
    const std::uint64_t idx = get_count(e, "eaten index");
    if (idx > std::numeric_limits<PointIndex>::max()) fail("eaten index too large");
    in.eaten.push_back(static_cast<PointIndex>(idx));
  }
  if (!j["children"].is_array()) fail("children must be an array");
  for (const auto& c : j["children"]) in.children.push_back(node_from_json(c, d, mode, depth + 1));
  try {
    check_internal_shape(in, mode, d);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return in;
}

PartitionTree tree_from_json(const json& j) {
  if (!j.is_object()) fail("document must be an object");
  if (j.contains("manifest")) {
    if (!j["manifest"].is_string()) fail("manifest must be a string");
    json copy = j;
    copy.erase("manifest");
    return tree_from_json(copy);
  }
  expect_keys(j, {"format", "version", "mode", "d", "n", "config", "root"}, "tree document");
  if (j["format"] != kTreeFormat) fail("not a celltree tree document");
  if (j["version"] != kVersion) fail("unsupported document version");
  if (!j["mode"].is_string()) fail("mode must be a string");
  const auto mode = parse_split_mode(j["mode"].get<std::string>());
  if (!mode) fail("unknown mode");
  const std::uint64_t d = get_count(j["d"], "d");
  if (d < 1 || d > 64) fail("d out of range");
  if (*mode == SplitMode::full && d >= 16) fail("full mode requires d < 16");
  const std::uint64_t n = get_count(j["n"], "n");

  const json& c = j["config"];
  if (!c.is_object()) fail("config must be an object");
  TreeConfig config;
  if (!c.contains("algorithm") || !c["algorithm"].is_string()) fail("config.algorithm missing");
  const auto algo = parse_algorithm(c["algorithm"].get<std::string>());
  if (!algo) fail("unknown algorithm");
  config.algorithm = *algo;
  if (*algo == Algorithm::lookahead) {
    expect_keys(c, {"algorithm", "alpha", "beta", "seed"}, "config");
    config.alpha = get_real(c["alpha"], "alpha");
  } else {
    expect_keys(c, {"algorithm", "beta", "seed"}, "config");
  }
  config.beta = get_real(c["beta"], "beta");
  config.seed = get_count(c["seed"], "seed");

  Node root = node_from_json(j["root"], d, *mode, 0);
  return PartitionTree(std::move(root), d, *mode, config, n);
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::string serialize(const PartitionTree& tree, std::string_view manifest) {
  json j = tree_to_json(tree);
  if (!manifest.empty()) j["manifest"] = manifest;
  return j.dump() + "\n";
}

PartitionTree deserialize(std::string_view text) {
  try {
    return tree_from_json(parse_document(text));
  } catch (const json::exception& e) {
    fail(std::string("schema violation: ") + e.what());
  }
}

std::string serialize_ensemble(std::span<const PartitionTree> trees, std::string_view manifest) {
  json members = json::array();
  for (const auto& t : trees) members.push_back(tree_to_json(t));
  json j{{"format", kEnsembleFormat}, {"version", kVersion}, {"trees", std::move(members)}};
  if (!manifest.empty()) j["manifest"] = manifest;
  return j.dump() + "\n";
}

std::vector<PartitionTree> deserialize_forest(std::string_view text) {
  try {
    json j = parse_document(text);
    if (j.is_object() && j.contains("format") && j["format"] == kEnsembleFormat) {
      json copy = j;
      copy.erase("manifest");
      expect_keys(copy, {"format", "version", "trees"}, "ensemble document");
      if (copy["version"] != kVersion) fail("unsupported document version");
      if (!copy["trees"].is_array() || copy["trees"].empty()) fail("ensemble needs trees");
      std::vector<PartitionTree> out;
      for (const auto& t : copy["trees"]) out.push_back(tree_from_json(t));
      return out;
    }
    std::vector<PartitionTree> out;
    out.push_back(tree_from_json(j));
    return out;
  } catch (const json::exception& e) {
    fail(std::string("schema violation: ") + e.what());
  }
}

}  // namespace celltree
