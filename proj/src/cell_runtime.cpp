#include "celltree/cell_runtime.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "celltree/seed.hpp"

namespace celltree {

CellFailure::CellFailure(std::string cell, std::uint64_t view_size, const std::string& what)
    : std::runtime_error("cell " + cell + " (N=" + std::to_string(view_size) + "): " + what),
      cell_(std::move(cell)),
      view_size_(view_size) {}

namespace {

struct Job {
  DataView view;
  std::uint64_t seed;
  std::size_t depth;
  Node* dest;
  std::string id;
  std::string parent;
};

void check_outcome(const CellOutcome& out, const DataView& view, SplitMode mode) {
  if (!out.split) return;
  Internal shape;
  shape.splits = out.splits;
  shape.eaten = out.eaten;
  shape.children.resize(out.children.size());
  check_internal_shape(shape, mode, view.dim());

  std::uint64_t total = out.eaten.size();
  for (const auto& c : out.children) {
    if (&c.dataset() != &view.dataset())
      throw std::logic_error("child view refers to a different dataset");
    total += c.size();
  }
  if (total != view.size())
    throw std::logic_error("children plus eaten pivots do not account for the cell's points");
}

class CellScheduler {
 public:
  CellScheduler(const CellProgram& program, SplitMode mode, const RunOptions& options)
      : program_(program), mode_(mode), options_(options) {
    if (options_.schedule_seed) order_.emplace(*options_.schedule_seed);
  }

  void run(Job root) {
    queue_.push_back(std::move(root));
    pending_ = 1;
    const std::size_t workers = std::max<std::size_t>(1, options_.workers);
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (std::size_t i = 0; i < workers; ++i) pool.emplace_back([this] { worker(); });
    }
    if (failure_) std::rethrow_exception(failure_);
  }

  std::vector<CellRecord> take_trace() { return std::move(trace_); }
  std::size_t executed() const noexcept { return executed_; }

 private:
  void worker() {
    while (true) {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return !queue_.empty() || pending_ == 0 || failure_; });
      if (pending_ == 0 || failure_) return;
      Job job = pop_locked();
      lock.unlock();

      std::vector<Job> children;
      std::optional<CellRecord> record;
      try {
        children = execute(job, record);
      } catch (...) {
        lock.lock();
        if (!failure_) failure_ = wrap_failure(job);
        cv_.notify_all();
        return;
      }

      lock.lock();
      ++executed_;
      if (record) trace_.push_back(std::move(*record));
      for (auto& c : children) queue_.push_back(std::move(c));
      pending_ += children.size();
      --pending_;
      cv_.notify_all();
    }
  }

  Job pop_locked() {
    std::size_t pick = 0;
    if (order_) pick = static_cast<std::size_t>(order_->below(queue_.size()));
    Job job = std::move(queue_[pick]);
    queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(pick));
    return job;
  }

  std::vector<Job> execute(Job& job, std::optional<CellRecord>& record) {
    CellOutcome out = program_(job.view, job.seed);
    check_outcome(out, job.view, mode_);

    if (options_.trace) {
      record = CellRecord{job.id,        job.parent,
                          job.view.size(), out.split,
                          job.seed,      fingerprint(job.view),
                          job.depth,     {job.view.indices().begin(), job.view.indices().end()}};
    }

    std::vector<Job> children;
    if (!out.split) {
      *job.dest = Leaf{job.view.counts()};
      return children;
    }
    Internal node;
    node.splits = std::move(out.splits);
    node.eaten = std::move(out.eaten);
    node.children.resize(out.children.size());
    *job.dest = std::move(node);
    // The children vector is never resized again, so these addresses are stable.
    Internal& placed = job.dest->internal();
    children.reserve(out.children.size());
    for (std::size_t i = 0; i < out.children.size(); ++i) {
      children.push_back(Job{std::move(out.children[i]), derive_child_seed(job.seed, i),
                             job.depth + 1, &placed.children[i], job.id + "." + std::to_string(i),
                             job.id});
    }
    return children;
  }

  std::exception_ptr wrap_failure(const Job& job) {
    try {
      throw;
    } catch (const std::exception& e) {
      return std::make_exception_ptr(CellFailure(job.id, job.view.size(), e.what()));
    } catch (...) {
      return std::make_exception_ptr(CellFailure(job.id, job.view.size(), "unknown error"));
    }
  }

  const CellProgram& program_;
  SplitMode mode_;
  const RunOptions& options_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Job> queue_;
  std::size_t pending_ = 0;
  std::size_t executed_ = 0;
  std::exception_ptr failure_;
  std::optional<CellStream> order_;
  std::vector<CellRecord> trace_;
};

// Path components of an id such as "r.1.0".
std::vector<std::size_t> id_path(const std::string& id) {
  std::vector<std::size_t> out;
  std::size_t pos = id.find('.');
  while (pos != std::string::npos) {
    const std::size_t next = id.find('.', pos + 1);
    out.push_back(std::stoul(id.substr(pos + 1, next == std::string::npos ? next : next - pos - 1)));
    pos = next;
  }
  return out;
}

}  // namespace

BuildResult run_cells(const CellTask& root, const CellProgram& program, SplitMode mode,
                      const TreeConfig& config, const RunOptions& options) {
  Node tree_root;
  CellScheduler scheduler(program, mode, options);
  scheduler.run(Job{root.view, root.seed, root.depth, &tree_root, "r", ""});

  std::vector<CellRecord> trace = scheduler.take_trace();
  std::sort(trace.begin(), trace.end(), [](const CellRecord& a, const CellRecord& b) {
    return id_path(a.id) < id_path(b.id);
  });
  PartitionTree tree(std::move(tree_root), root.view.dim(), mode, config, root.view.size());
  return BuildResult{std::move(tree), std::move(trace), scheduler.executed()};
}

std::string trace_jsonl(std::span<const CellRecord> trace) {
  std::string out;
  char hex[17];
  for (const auto& r : trace) {
    nlohmann::json j;
    j["cell"] = r.id;
    j["parent"] = r.parent.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.parent);
    j["n"] = r.size;
    j["decision"] = r.split ? "split" : "stop";
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(r.seed));
    j["seed"] = hex;
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(r.input_fingerprint));
    j["input"] = hex;
    out += j.dump();
    out += '\n';
  }
  return out;
}

AuditReport audit_autonomy(const Dataset& data, std::span<const CellRecord> trace,
                           const CellProgram& program, std::uint64_t audit_seed,
                           std::size_t replays) {
  AuditReport report;
  std::map<std::string, const CellRecord*> by_id;
  for (const auto& r : trace) by_id[r.id] = &r;

  std::map<std::pair<std::uint64_t, std::uint64_t>, const CellRecord*> by_input;
  for (const auto& r : trace) {
    ++report.records_checked;
    DataView view(data, r.members);
    if (fingerprint(view) != r.input_fingerprint || view.size() != r.size)
      report.violations.push_back(r.id + ": recorded input does not match its members");

    if (!r.parent.empty()) {
      auto it = by_id.find(r.parent);
      const auto path = id_path(r.id);
      if (it == by_id.end() || path.empty())
        report.violations.push_back(r.id + ": parent missing from trace");
      else if (derive_child_seed(it->second->seed, path.back()) != r.seed)
        report.violations.push_back(r.id + ": seed not derived from parent seed and ordinal");
    }

    auto [it, fresh] = by_input.try_emplace({r.input_fingerprint, r.seed}, &r);
    if (!fresh && it->second->split != r.split)
      report.violations.push_back(r.id + ": decision differs from " + it->second->id +
                                  " on identical input and seed");
  }

  // Children of each record, ordered by ordinal.
  std::map<std::string, std::vector<const CellRecord*>> children;
  for (const auto& r : trace) {
    if (!r.parent.empty()) children[r.parent].push_back(&r);
  }

  std::vector<const CellRecord*> pool;
  for (const auto& r : trace) pool.push_back(&r);
  CellStream pick(audit_seed);
  const std::size_t count = std::min(replays, pool.size());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(pick.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    const CellRecord& r = *pool[i];
    ++report.replayed;

    DataView original(data, r.members);
    const Dataset alone = isolate(original);
    CellOutcome out;
    try {
      out = program(DataView::all(alone), r.seed);
    } catch (const std::exception& e) {
      report.violations.push_back(r.id + ": replay in isolation threw: " + e.what());
      continue;
    }
    if (out.split != r.split) {
      report.violations.push_back(r.id + ": replay in isolation decided " +
                                  (out.split ? "split" : "stop") + ", recorded " +
                                  (r.split ? "split" : "stop"));
      continue;
    }
    if (!out.split) continue;
    const auto& kids = children[r.id];
    if (kids.size() != out.children.size()) {
      report.violations.push_back(r.id + ": replay produced a different number of children");
      continue;
    }
    for (std::size_t c = 0; c < kids.size(); ++c) {
      std::vector<PointIndex> mapped;
      for (PointIndex k : out.children[c].indices()) mapped.push_back(r.members[k]);
      if (mapped != kids[c]->members) {
        report.violations.push_back(r.id + ": replay sent different points to child " +
                                    std::to_string(c));
        break;
      }
    }
  }
  report.passed = report.violations.empty();
  return report;
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard g(mu);
            if (!failure) failure = std::current_exception();
            next.store(count);
            return;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace celltree
