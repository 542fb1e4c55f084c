#ifndef CUSPBERGMAN_PARALLEL_HPP
#define CUSPBERGMAN_PARALLEL_HPP

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace cuspbergman {

// Worker count: hardware concurrency, capped by CUSPBERGMAN_THREADS.
inline unsigned max_threads() {
  static const unsigned cached = [] {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("CUSPBERGMAN_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v >= 1 && static_cast<unsigned long>(v) < hw) hw = static_cast<unsigned>(v);
    }
    return hw;
  }();
  return cached;
}

// Static contiguous partition of [0, n); each index is processed exactly once
// and writes only to its own slot, so results do not depend on the worker
// count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned workers = max_threads();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (static_cast<std::size_t>(workers) > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = n * w / workers;
    std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace cuspbergman

#endif
