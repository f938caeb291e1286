#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "celltree/dataset.hpp"
#include "celltree/tree.hpp"

namespace celltree {

/// What a cell returns: either a terminal signal, or the cuts it made, the
/// pivots those cuts consumed, and the data for each child.
struct CellOutcome {
  bool split = false;
  std::vector<SplitRecord> splits;
  std::vector<PointIndex> eaten;
  std::vector<DataView> children;

  static CellOutcome stop() { return {}; }
};

/// A cell's decision rule. It receives the cell's data and the cell's seed
/// and nothing else; in particular neither the depth of the cell nor the size
/// of the sample is passed. Rules must also not reach for them through the
/// view's backing dataset; audit_autonomy catches rules that do.
using CellProgram = std::function<CellOutcome(const DataView& view, std::uint64_t seed)>;

/// One unit of work. `depth` is carried for the trace only.
struct CellTask {
  DataView view;
  std::uint64_t seed = 0;
  std::size_t depth = 0;
  Algorithm algorithm = Algorithm::randomized;
};

struct RunOptions {
  std::size_t workers = 1;
  bool trace = false;
  /// When set, workers pop tasks in a pseudo-random order drawn from this
  /// seed instead of FIFO. Only useful for testing schedule independence.
  std::optional<std::uint64_t> schedule_seed;
};

/// One executed cell. `id` is the path from the root, e.g. "r.1.0".
struct CellRecord {
  std::string id;
  std::string parent;  // empty for the root
  std::uint64_t size = 0;
  bool split = false;
  std::uint64_t seed = 0;
  std::uint64_t input_fingerprint = 0;  // fingerprint of the view contents
  std::size_t depth = 0;
  std::vector<PointIndex> members;
};

struct BuildResult {
  PartitionTree tree;
  std::vector<CellRecord> trace;  // sorted by id; empty unless tracing
  std::size_t tasks_executed = 0;
};

/// A cell rule threw or produced an inconsistent outcome.
class CellFailure : public std::runtime_error {
 public:
  CellFailure(std::string cell, std::uint64_t view_size, const std::string& what);
  const std::string& cell() const noexcept { return cell_; }
  std::uint64_t view_size() const noexcept { return view_size_; }

 private:
  std::string cell_;
  std::uint64_t view_size_;
};

/// Runs `program` on the root task and, recursively, on every child it
/// produces, using a shared work queue served by `options.workers` threads.
/// Child i of a cell seeded s is seeded derive_child_seed(s, i). The result is
/// identical for every worker count and every execution order.
BuildResult run_cells(const CellTask& root, const CellProgram& program, SplitMode mode,
                      const TreeConfig& config, const RunOptions& options = {});

/// Line-delimited trace: one JSON object per cell with keys
/// cell, parent, n, decision, seed, input.
std::string trace_jsonl(std::span<const CellRecord> trace);

struct AuditReport {
  bool passed = true;
  std::size_t records_checked = 0;
  std::size_t replayed = 0;
  std::vector<std::string> violations;  // each names the offending cell
};

/// Checks a build trace for cell autonomy:
///  - every record's input fingerprint matches its member list;
///  - every child seed is derived from its parent's seed and ordinal only;
///  - records with equal (input, seed) made equal decisions;
///  - `replays` randomly chosen cells, re-run on a fresh dataset holding only
///    their own points, reproduce their recorded decision and children.
AuditReport audit_autonomy(const Dataset& data, std::span<const CellRecord> trace,
                           const CellProgram& program, std::uint64_t audit_seed = 0,
                           std::size_t replays = 10);

/// Calls fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace celltree
