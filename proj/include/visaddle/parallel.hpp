#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#else
inline int omp_get_max_threads() { return 1; }
inline int omp_get_thread_num() { return 0; }
inline void omp_set_num_threads(int) {}
#endif

namespace visaddle::par {

// Process-wide switch for the OpenMP kernels. The serial reference kernels
// (reference_kernels.hpp) ignore it; they are always plain loops.
bool enabled();
void set_enabled(bool on);

// n <= 0 restores the OpenMP runtime default.
void set_threads(int n);

inline constexpr std::ptrdiff_t kChunk = 64;

// Sum of per-item contributions, accumulated in fixed chunks of kChunk items
// and reduced in chunk order. The result is identical for any thread count,
// including the serial (disabled) path.
//
// Acc needs copy construction from `zero` and operator+=. PerItem is called
// as per_item(acc, i) and adds item i into acc.
template <class Acc, class PerItem>
Acc chunked_sum(std::ptrdiff_t n, const Acc& zero, PerItem&& per_item) {
  if (n <= 0) return zero;
  const std::ptrdiff_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<Acc> partial(static_cast<std::size_t>(nchunks), zero);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (enabled() && nchunks > 1)
#endif
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    Acc acc = zero;
    const std::ptrdiff_t lo = c * kChunk;
    const std::ptrdiff_t hi = std::min(n, lo + kChunk);
    for (std::ptrdiff_t i = lo; i < hi; ++i) per_item(acc, i);
    partial[static_cast<std::size_t>(c)] = std::move(acc);
  }
  Acc total = zero;
  for (auto& p : partial) total += p;
  return total;
}

// Max of a per-item score. fp max is order-independent, so a plain OpenMP
// reduction is deterministic here.
template <class Score>
double indexed_max(std::ptrdiff_t n, double init, Score&& score) {
  double best = init;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : best) \
    if (enabled() && n > 1)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) best = std::max(best, score(i));
  return best;
}

template <class Score>
double indexed_min(std::ptrdiff_t n, double init, Score&& score) {
  double best = init;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(min : best) \
    if (enabled() && n > 1)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) best = std::min(best, score(i));
  return best;
}

}  // namespace visaddle::par
