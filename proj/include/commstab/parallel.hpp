#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Deterministic parallel kernels. Work is split into fixed-size chunks and
// partial results are folded in chunk order, so every reduction returns
// bit-identical results for any thread count, including the serial path.
namespace commstab::par {

// Process-wide switch between the OpenMP path and the serial reference path.
inline bool& enabled() {
  static bool on = true;
  return on;
}

inline int worker_count() {
#ifdef _OPENMP
  return enabled() ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

// body(begin, end) reduces one chunk [begin, end); fold(acc, partial) combines
// partials left to right.
template <class T, class Body, class Fold>
T chunked_reduce(std::size_t n, std::size_t chunk, T init, Body body, Fold fold) {
  if (n == 0) return init;
  if (chunk == 0) chunk = 1;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<T> partial(nchunks, init);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (enabled())
#endif
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(nchunks); ++ci) {
    const std::size_t begin = static_cast<std::size_t>(ci) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    partial[static_cast<std::size_t>(ci)] = body(begin, end);
  }
  T acc = init;
  for (std::size_t ci = 0; ci < nchunks; ++ci) acc = fold(acc, partial[ci]);
  return acc;
}

// Independent iterations; body(i) may only write state owned by index i.
template <class Body>
void parallel_for(std::size_t n, Body body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (enabled())
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    body(static_cast<std::size_t>(i));
  }
}

}  // namespace commstab::par
