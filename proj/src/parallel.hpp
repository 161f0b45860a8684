// parallel.hpp - deterministic chunked parallel loop.  The body must depend
// only on its index (plus read-only captures); outputs go to per-index slots
// or per-thread accumulators, so the schedule cannot change any result.
#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace trendratio::detail {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <typename Body>
void parallel_for(long n, int threads, Body&& body) {
  threads = std::min<long>(resolve_threads(threads), std::max(1L, n));
  if (threads <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex mu;
  std::exception_ptr first_error;
  const long chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const long lo = w * chunk;
    const long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (long i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace trendratio::detail
