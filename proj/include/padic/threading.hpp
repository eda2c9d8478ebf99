#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace padic {

inline std::atomic<int>& max_threads_ref() {
  static std::atomic<int> n{1};
  return n;
}

inline void set_max_threads(int n) { max_threads_ref().store(n < 1 ? 1 : n); }
inline int max_threads() { return max_threads_ref().load(); }

// Static chunking over [0, n); each index is processed exactly once and the
// work per index is independent, so output does not depend on worker count.
inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t)>& body) {
  const int workers = max_threads();
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t w = static_cast<std::size_t>(workers);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t lo = n * t / w;
      const std::size_t hi = n * (t + 1) / w;
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace padic
