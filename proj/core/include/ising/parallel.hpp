#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace ising {

// Splits [0, total) into `threads` contiguous chunks and runs fn(begin, end,
// chunk) on each. Callers merge per-chunk results in chunk order, which keeps
// reductions deterministic for any thread count.
template <class Fn>
void parallel_chunks(uint64_t total, int threads, Fn&& fn) {
  if (threads <= 1 || total < 2) {
    fn(uint64_t{0}, total, 0);
    return;
  }
  const int k = threads;
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (int c = 0; c < k; ++c) {
    const uint64_t begin = total * c / k;
    const uint64_t end = total * (c + 1) / k;
    pool.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ising
