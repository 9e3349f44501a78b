#include "hsipca/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "hsipca/error.hpp"

namespace hsipca {

std::string_view to_string(ExecMode mode) {
  return mode == ExecMode::deterministic ? "deterministic" : "fast";
}

ExecMode parse_exec_mode(std::string_view text) {
  if (text == "deterministic") return ExecMode::deterministic;
  if (text == "fast") return ExecMode::fast;
  throw InvalidArgument("unknown execution mode '" + std::string(text) +
                        "' (expected deterministic or fast)");
}

void ExecPlan::validate() const {
  if (workers < 1) throw InvalidArgument("worker count must be at least 1");
}

ExecPlan ExecPlan::from_environment() {
  ExecPlan plan;
  plan.workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HSIPCA_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (*end != '\0' || value < 1)
      throw InvalidArgument("HSIPCA_WORKERS must be a positive integer, got '" +
                            std::string(env) + "'");
    plan.workers = static_cast<std::size_t>(value);
  }
  if (const char* env = std::getenv("HSIPCA_MODE"); env != nullptr && *env != '\0')
    plan.mode = parse_exec_mode(env);
  return plan;
}

std::string_view to_string(PartitionKind kind) {
  switch (kind) {
    case PartitionKind::by_band: return "by_band";
    case PartitionKind::by_pixel_chunk: return "by_pixel_chunk";
    case PartitionKind::by_triangle_entry: return "by_triangle_entry";
    case PartitionKind::rotation_batch: return "rotation_batch";
  }
  return "unknown";
}

PartitionSchedule partition(PartitionKind kind, std::size_t total, std::size_t workers) {
  if (workers < 1) throw InvalidArgument("partition needs at least one worker");
  PartitionSchedule schedule{kind, total, {}};
  schedule.assignments.reserve(workers);
  const std::size_t base = total / workers;
  const std::size_t extra = total % workers;
  std::size_t begin = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t len = base + (w < extra ? 1 : 0);
    schedule.assignments.push_back({begin, begin + len});
    begin += len;
  }
  return schedule;
}

std::vector<IndexRange> fixed_chunks(std::size_t total, std::size_t chunk) {
  if (chunk == 0) throw InvalidArgument("chunk size must be positive");
  std::vector<IndexRange> out;
  out.reserve((total + chunk - 1) / chunk);
  for (std::size_t b = 0; b < total; b += chunk) out.push_back({b, std::min(total, b + chunk)});
  return out;
}

struct Executor::Pool {
  std::mutex mutex;
  std::condition_variable wake;
  std::condition_variable done;
  const std::function<void(std::size_t)>* job = nullptr;
  std::size_t tasks = 0;
  std::atomic<std::size_t> next{0};
  std::size_t busy = 0;
  std::uint64_t generation = 0;
  bool stopping = false;
  std::exception_ptr error;
  std::vector<std::jthread> threads;

  void drain(const std::function<void(std::size_t)>& fn, std::size_t count) {
    for (;;) {
      const std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= count) return;
      try {
        fn(t);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        next.store(count, std::memory_order_relaxed);
      }
    }
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(std::size_t)>* fn = nullptr;
      std::size_t count = 0;
      {
        std::unique_lock lock(mutex);
        wake.wait(lock, [&] { return stopping || generation != seen; });
        if (stopping) return;
        seen = generation;
        fn = job;
        count = tasks;
      }
      drain(*fn, count);
      std::lock_guard lock(mutex);
      if (--busy == 0) done.notify_all();
    }
  }
};

Executor::Executor(ExecPlan plan) : plan_(plan) {
  plan_.validate();
  if (plan_.workers > 1) {
    pool_ = std::make_unique<Pool>();
    pool_->threads.reserve(plan_.workers - 1);
    for (std::size_t w = 0; w + 1 < plan_.workers; ++w)
      pool_->threads.emplace_back([p = pool_.get()] { p->worker_loop(); });
  }
}

Executor::~Executor() {
  if (pool_) {
    {
      std::lock_guard lock(pool_->mutex);
      pool_->stopping = true;
    }
    pool_->wake.notify_all();
    pool_->threads.clear();
  }
}

void Executor::run(std::size_t tasks, const std::function<void(std::size_t)>& task) {
  if (!pool_ || tasks <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) task(t);
    return;
  }
  std::lock_guard serial(run_guard_);
  Pool& p = *pool_;
  {
    std::lock_guard lock(p.mutex);
    p.job = &task;
    p.tasks = tasks;
    p.next.store(0, std::memory_order_relaxed);
    p.busy = p.threads.size();
    p.error = nullptr;
    ++p.generation;
  }
  p.wake.notify_all();
  p.drain(task, tasks);
  std::unique_lock lock(p.mutex);
  p.done.wait(lock, [&] { return p.busy == 0; });
  p.job = nullptr;
  if (p.error) std::rethrow_exception(std::exchange(p.error, nullptr));
}

Executor& serial_executor() {
  static Executor serial{ExecPlan{}};
  return serial;
}

}  // namespace hsipca
