// Block-partitioned parallel loop. Work items must be independent; each
// worker gets one contiguous range, so results written by index are the
// same no matter how many workers run.

#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fpsynth {

inline int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

/// Calls fn(begin, end) for disjoint ranges covering [0, n). With
/// workers <= 1 the call happens inline. The first exception thrown by
/// any worker is rethrown after all workers join.
template <typename Fn>
void parallel_for(size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  workers = std::max(1, workers);
  const size_t max_useful = n;
  const size_t n_workers = std::min<size_t>(static_cast<size_t>(workers), max_useful);
  if (n_workers <= 1) {
    fn(size_t{0}, n);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  const size_t chunk = (n + n_workers - 1) / n_workers;
  for (size_t w = 0; w < n_workers; ++w) {
    const size_t begin = w * chunk;
    const size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end]() {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fpsynth
