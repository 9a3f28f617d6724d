#pragma once

#include <cmath>
#include <vector>

namespace flexbeam {

// log(n!) with an exact-summation table; series coefficients pair factorials
// near the double range limits, so these are always combined in log space.
inline double log_factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(1025, 0.0);
    for (std::size_t i = 2; i < t.size(); ++i) {
      t[i] = t[i - 1] + std::log(static_cast<double>(i));
    }
    return t;
  }();
  if (n < 0) return 0.0;
  if (static_cast<std::size_t>(n) < table.size()) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace flexbeam
