#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mosm {

/// Process-wide default worker count (0 means "use hardware concurrency").
unsigned default_workers();
void set_default_workers(unsigned workers);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Indices are split into
/// contiguous blocks, so any per-index output is independent of the schedule.
/// The first exception thrown by a worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = default_workers();
  const std::size_t nthreads = std::min<std::size_t>(std::max(1u, workers), n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t begin = n * t / nthreads;
    const std::size_t end = n * (t + 1) / nthreads;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mosm
