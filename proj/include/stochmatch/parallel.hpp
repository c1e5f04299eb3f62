#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stochmatch {

// Trials are grouped into fixed blocks. Each block starts from a fresh
// accumulator and blocks are merged in index order, so the result depends
// only on the block size, never on how many workers ran the blocks.
inline constexpr std::size_t kTrialBlock = 256;

// Worker count precedence: explicit value, then STOCHMATCH_WORKERS, then the
// OpenMP default. Always >= 1.
int resolve_workers(std::optional<int> requested = std::nullopt);

// body(i, acc) for i in [0, n); merge(into, from).
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::size_t n, int workers, const Acc& init, Body&& body, Merge&& merge) {
  const std::size_t blocks = (n + kTrialBlock - 1) / kTrialBlock;
  std::vector<Acc> partial(blocks, init);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers < 1 ? 1 : workers)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kTrialBlock;
    const std::size_t hi = lo + kTrialBlock < n ? lo + kTrialBlock : n;
    Acc& acc = partial[static_cast<std::size_t>(b)];
    for (std::size_t i = lo; i < hi; ++i) body(i, acc);
  }
  Acc out = init;
  for (const Acc& p : partial) merge(out, p);
  return out;
}

// Reference: one accumulator, trials in order, no threads. Integer-valued
// accumulators agree exactly with parallel_reduce; floating sums agree up to
// summation order.
template <class Acc, class Body>
Acc serial_reduce(std::size_t n, const Acc& init, Body&& body) {
  Acc acc = init;
  for (std::size_t i = 0; i < n; ++i) body(i, acc);
  return acc;
}

// Independent per-index work with results stored by index.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers < 1 ? 1 : workers)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    body(static_cast<std::size_t>(i));
  }
}

}  // namespace stochmatch
