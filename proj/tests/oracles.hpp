#pragma once

// Independent reference computations used by the tests. Deliberately written
// without the library's helpers: long double, plain loops, no symmetry tricks.

#include <cmath>
#include <numbers>

namespace oracle {

inline long double lattice_sum(long double exponent, int n, int k) {
  const long double pi = std::numbers::pi_v<long double>;
  long double acc = 0.0L;
  for (int j = 1; j < n; ++j) {
    const long double num = std::sin(pi * k * j / n);
    const long double den = std::sin(pi * j / n);
    acc += num * num / std::pow(den, exponent + 1.0L);
  }
  return acc / std::pow(2.0L, exponent);
}

inline double s(double alpha, int n, int k) { return static_cast<double>(lattice_sum(alpha, n, k)); }
inline double sbar(double alpha, int n, int k) { return static_cast<double>(lattice_sum(alpha - 2.0L, n, k)); }

} // namespace oracle
