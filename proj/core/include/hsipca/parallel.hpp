#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace hsipca {

enum class ExecMode {
  deterministic,  // fixed task shapes and a fixed reduction tree
  fast,           // partials combined in completion order
};

std::string_view to_string(ExecMode mode);
ExecMode parse_exec_mode(std::string_view text);

struct ExecPlan {
  std::size_t workers = 1;
  ExecMode mode = ExecMode::deterministic;
  // Partition granularity hint in elements; 0 lets each stage pick its default.
  std::size_t chunk = 0;

  void validate() const;

  // Hardware concurrency, overridden by HSIPCA_WORKERS / HSIPCA_MODE when set.
  static ExecPlan from_environment();
};

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

enum class PartitionKind { by_band, by_pixel_chunk, by_triangle_entry, rotation_batch };

std::string_view to_string(PartitionKind kind);

struct PartitionSchedule {
  PartitionKind kind = PartitionKind::by_band;
  std::size_t total = 0;
  std::vector<IndexRange> assignments;  // one range per worker
};

// Contiguous near-equal split of [0, total): the first total % workers
// ranges get one extra element.
PartitionSchedule partition(PartitionKind kind, std::size_t total, std::size_t workers);

// Worker-independent chunking: ranges of `chunk` elements, last one short.
std::vector<IndexRange> fixed_chunks(std::size_t total, std::size_t chunk);

// Combines adjacent pairs level by level, left to right. The tree depends
// only on items.size().
template <class T, class Combine>
T tree_reduce(std::vector<T> items, Combine combine) {
  if (items.empty()) return T{};
  while (items.size() > 1) {
    std::vector<T> next;
    next.reserve((items.size() + 1) / 2);
    for (std::size_t k = 0; k + 1 < items.size(); k += 2)
      next.push_back(combine(std::move(items[k]), std::move(items[k + 1])));
    if (items.size() % 2 == 1) next.push_back(std::move(items.back()));
    items = std::move(next);
  }
  return std::move(items.front());
}

// Deterministic mode uses tree_reduce; fast mode folds left in the order the
// items were produced.
template <class T, class Combine>
T parallel_reduce(std::vector<T> items, Combine combine, ExecMode mode) {
  if (items.empty()) return T{};
  if (mode == ExecMode::deterministic) return tree_reduce(std::move(items), combine);
  T acc = std::move(items.front());
  for (std::size_t k = 1; k < items.size(); ++k) acc = combine(std::move(acc), std::move(items[k]));
  return acc;
}

// Persistent worker pool. run() is a barrier: it returns after every task of
// the call has finished, and rethrows the first exception a task raised.
class Executor {
 public:
  explicit Executor(ExecPlan plan = {});
  ~Executor();
  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  const ExecPlan& plan() const noexcept { return plan_; }
  std::size_t workers() const noexcept { return plan_.workers; }
  ExecMode mode() const noexcept { return plan_.mode; }

  void run(std::size_t tasks, const std::function<void(std::size_t)>& task);

  // Maps each task index to a partial and reduces the partials per mode().
  template <class T, class Map, class Combine>
  T map_reduce(std::size_t tasks, Map map, Combine combine) {
    if (tasks == 0) return T{};
    if (plan_.mode == ExecMode::deterministic) {
      std::vector<std::optional<T>> slots(tasks);
      run(tasks, [&](std::size_t t) { slots[t].emplace(map(t)); });
      std::vector<T> partials;
      partials.reserve(tasks);
      for (auto& s : slots) partials.push_back(std::move(*s));
      return tree_reduce(std::move(partials), combine);
    }
    std::mutex guard;
    std::optional<T> acc;
    run(tasks, [&](std::size_t t) {
      T partial = map(t);
      std::lock_guard lock(guard);
      if (acc) {
        acc.emplace(combine(std::move(*acc), std::move(partial)));
      } else {
        acc.emplace(std::move(partial));
      }
    });
    return std::move(*acc);
  }

 private:
  struct Pool;
  ExecPlan plan_;
  std::unique_ptr<Pool> pool_;
  std::mutex run_guard_;
};

// Shared single-worker executor used as the default argument.
Executor& serial_executor();

}  // namespace hsipca
