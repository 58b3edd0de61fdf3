#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sention {

inline int& thread_count_ref() {
  static int count = 0;  // 0 = hardware concurrency
  return count;
}

/// Caps the worker pool used by parallel loops; 0 restores the hardware default.
inline void set_thread_count(int n) { thread_count_ref() = n; }

inline int effective_threads() {
  const int configured = thread_count_ref();
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(begin, end) over contiguous chunks of [0, n) on up to
/// effective_threads() threads. Chunk boundaries depend only on n and the
/// chunk count, so fixed-order reductions over chunk results are
/// deterministic regardless of scheduling.
inline void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                            int threads = 0) {
  if (n == 0) return;
  const std::size_t want = static_cast<std::size_t>(threads > 0 ? threads : effective_threads());
  const int t = static_cast<int>(std::max<std::size_t>(1, std::min(want, n)));
  if (t == 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t chunk = (n + t - 1) / t;
  for (int i = 0; i < t; ++i) {
    const std::size_t b = static_cast<std::size_t>(i) * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, i, b, e] {
      try {
        fn(static_cast<std::size_t>(i), b, e);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Element-wise parallel loop.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0) {
  parallel_chunks(
      n,
      [&fn](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
      },
      threads);
}

}  // namespace sention
