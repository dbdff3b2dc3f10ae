#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace budgetcot {

/// Bounded worker pool over independent per-item tasks. The first exception
/// thrown by any task is rethrown after all workers stop.
class Scheduler {
 public:
  explicit Scheduler(unsigned concurrency = 1) : concurrency_(std::max(1u, concurrency)) {}

  unsigned concurrency() const noexcept { return concurrency_; }

  void for_each(std::size_t count, const std::function<void(std::size_t)>& task) const {
    if (count == 0) return;
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(concurrency_, count));
    if (workers == 1) {
      for (std::size_t i = 0; i < count; ++i) task(i);
      return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
      for (std::size_t i; !stop && (i = next.fetch_add(1)) < count;) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          stop = true;
        }
      }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

 private:
  unsigned concurrency_;
};

}  // namespace budgetcot
