#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace qubofs {

/// Runs fn(0..count-1) on up to `threads` workers. Cells pick indices off a
/// shared counter; callers get determinism by writing each result to its own
/// slot and reducing in index order afterwards.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int n_workers = std::min(std::max(threads, 1), count);
  if (n_workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace qubofs
