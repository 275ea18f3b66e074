#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace specboot {

/// Runs body(i, worker) for i in [0, count) on up to `workers` threads.
///
/// Work items are claimed from a shared counter, so which worker runs which
/// item is unspecified; callers must make each item a pure function of its
/// index and write results to slot i. The first exception thrown by any item
/// is rethrown on the calling thread after all workers have stopped.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  if (count == 0) return;
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i, 0u);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto run = [&](unsigned worker) {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i, worker);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(n_threads - 1);
  for (unsigned w = 1; w < n_threads; ++w) pool.emplace_back(run, w);
  run(0);
  pool.clear();  // joins
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace specboot
