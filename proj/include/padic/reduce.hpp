#pragma once

#include <cstddef>
#include <span>

namespace padic {

// Fixed pairwise reduction tree: the summation order depends only on the
// element count, never on thread scheduling, so results are bit-identical
// for any worker count.
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

}  // namespace padic
