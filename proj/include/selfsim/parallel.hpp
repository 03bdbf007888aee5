#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace selfsim {

// Runs f(i) for i in [0, n).  Work is split into contiguous blocks, one per
// worker; each result must be written to a slot owned by index i, so the
// outcome is independent of the number of jobs.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace selfsim
