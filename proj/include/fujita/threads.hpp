#pragma once

// Minimal deterministic worker pool for parameter sweeps. The thread count
// honors FUJITA_LAB_THREADS when set; results are always written by index,
// so output ordering never depends on scheduling.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace fujita {

inline int worker_count() {
  if (const char* env = std::getenv("FUJITA_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run f(i) for i in [0, n) on the worker pool. f must be safe to call
// concurrently for distinct i; exceptions propagate from the first failed
// index (deterministically the lowest one).
template <class F>
void parallel_for(int n, F&& f) {
  const int workers = std::min(worker_count(), std::max(n, 1));
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < n; i += workers) {
        try {
          f(i);
        } catch (...) {
          errors[static_cast<size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fujita
