#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lorentz {

/// Worker count from an explicit request, else LORENTZ_LAB_THREADS, else the
/// hardware concurrency.
unsigned resolve_workers(unsigned requested);

/// Runs fn(index, worker) for every index in [0, count) on `workers` threads.
/// Results must be written to index-addressed storage; the first exception is
/// rethrown after all threads stop.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i, 0u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t chunk = count / (64 * workers) + 1;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t begin = next.fetch_add(chunk);
          if (begin >= count || failed.load(std::memory_order_relaxed)) return;
          const std::size_t end = begin + chunk < count ? begin + chunk : count;
          for (std::size_t i = begin; i < end; ++i) fn(i, w);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lorentz
