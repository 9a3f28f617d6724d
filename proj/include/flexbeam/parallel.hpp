#pragma once

#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace flexbeam {

// Thread budget: FLEXBEAM_THREADS caps parallelism, default is the hardware
// concurrency. Values < 1 fall back to 1.
inline int thread_budget() {
  if (const char* env = std::getenv("FLEXBEAM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
    return 1;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static-partition parallel loop. Each index is processed exactly once and
// writes only its own slots, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int threads = thread_budget();
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace flexbeam
