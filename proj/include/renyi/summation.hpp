#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace renyi {

/// Pairwise (tree) summation. The tree shape depends only on the length of
/// the input, so results are reproducible bit for bit.
inline double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 8;
  const std::size_t n = values.size();
  if (n <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& values) {
  return pairwise_sum(std::span<const double>(values));
}

/// Number of worker threads used by the parallel loops. Zero means
/// std::thread::hardware_concurrency().
inline unsigned& worker_count() {
  static unsigned count = 0;
  return count;
}

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks write to
/// disjoint output slots; any reduction happens afterwards, so the result
/// does not depend on the number of workers.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  unsigned workers = worker_count();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers <= 1 || n < 64) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, n);
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = c * step;
    const std::size_t end = std::min(n, begin + step);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace renyi
