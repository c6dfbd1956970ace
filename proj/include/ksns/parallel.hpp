#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include <omp.h>

namespace ksns::parallel {

/// Block length of the fixed reduction tree. Partial sums are formed per block
/// and combined serially, so a reduction never depends on the worker count.
inline constexpr std::size_t kReductionBlock = 2048;

inline void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int max_threads() { return omp_get_max_threads(); }

template <class F>
void for_each_index(std::size_t n, F&& body) {
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

/// Sum of term(i) for i in [0, n), reproducible bit-for-bit across thread counts.
template <class F>
double sum(std::size_t n, F&& term) {
  if (n == 0) return 0.0;
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Maximum of term(i); max is order independent so no block tree is needed.
template <class F>
double max(std::size_t n, F&& term, double init = 0.0) {
  double m = init;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < count; ++i) m = std::max(m, term(static_cast<std::size_t>(i)));
  return m;
}

}  // namespace ksns::parallel
