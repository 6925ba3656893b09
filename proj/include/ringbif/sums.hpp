#pragma once

// Trigonometric lattice sums of the regular polygon and the block
// coefficients built from them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ringbif/errors.hpp"

namespace ringbif {

/// Pairwise (cascade) summation; error grows like O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> terms) {
  const std::size_t n = terms.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

/// Reduce k into [0, n).
inline int reduce_mode(int k, int n) {
  const int r = k % n;
  return r < 0 ? r + n : r;
}

/// sin(pi m / n) with the argument reduced exactly in integers to [0, pi/2]
/// before evaluation, so rational angles such as pi/2 or pi give exact zeros
/// and large m j products carry no accumulated rounding.
inline double sin_pi_ratio(long long m, long long n) {
  long long r = m % (2 * n);
  if (r < 0) r += 2 * n;
  const double sign = r < n ? 1.0 : -1.0;
  r %= n;
  r = std::min(r, n - r);
  if (r == 0) return 0.0;
  if (2 * r == n) return sign;
  return sign * std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
}

/// cos(pi m / n), via the same exact reduction.
inline double cos_pi_ratio(long long m, long long n) { return sin_pi_ratio(n - 2 * m, 2 * n); }

namespace detail {

// 2^{-e} sum_{j=1}^{n-1} sin^2(k j zeta/2) / sin^{e+1}(j zeta/2), no domain check.
inline double lattice_sum(double exponent, int n, int k) {
  if (n < 2) throw DomainError("lattice sum needs n >= 2, got " + std::to_string(n));
  const int kr = reduce_mode(k, n);
  if (kr == 0) return 0.0;
  const double power = exponent + 1.0;
  std::vector<double> terms(static_cast<std::size_t>(n - 1));
  for (int j = 1; j < n; ++j) {
    const double num = sin_pi_ratio(static_cast<long long>(kr) * j, n);
    const double base = sin_pi_ratio(j, n);
    double denom = 1.0;
    if (power == 2.0) {
      denom = base * base;
    } else if (power == 1.0) {
      denom = base;
    } else if (power != 0.0) {
      denom = std::pow(base, power);
    }
    terms[static_cast<std::size_t>(j - 1)] = num * num / denom;
  }
  return pairwise_sum(terms) * std::pow(2.0, -exponent);
}

inline void require_alpha(double alpha) {
  if (!(alpha >= 1.0)) {
    throw DomainError("attraction exponent must satisfy alpha >= 1, got " + std::to_string(alpha));
  }
}

} // namespace detail

/// s_k for the homogeneous potential with exponent alpha. k is taken mod n.
inline double s_sum(double alpha, int n, int k) {
  detail::require_alpha(alpha);
  return detail::lattice_sum(alpha, n, k);
}

/// The same sum with exponent alpha - 2 (the "s-bar" of the recurrence).
inline double s_bar(double alpha, int n, int k) {
  detail::require_alpha(alpha);
  return detail::lattice_sum(alpha - 2.0, n, k);
}

/// s_0..s_{k_max} from s_1 and the s-bar values only, via
/// s_{k+1} - s_k = (2k+1) s_1 - sum_{h<=k} sbar_h.
///
/// The recurrence is run up to floor(n/2) and mirrored with s_k = s_{n-k};
/// running it to k = n cancels O(k^2 s_1) terms down to s_n = 0.
inline std::vector<double> s_via_recurrence(double alpha, int n, int k_max) {
  detail::require_alpha(alpha);
  if (k_max < 0 || k_max > n) {
    throw DomainError("k_max must lie in [0, n]");
  }
  const int half = n / 2;
  const int top = std::min(k_max, half);
  std::vector<double> low(static_cast<std::size_t>(top + 1), 0.0);
  if (top >= 1) {
    const double s1 = s_sum(alpha, n, 1);
    low[1] = s1;
    // Neumaier-compensated running sum of sbar_h.
    double acc = 0.0, comp = 0.0;
    for (int k = 1; k < top; ++k) {
      const double term = s_bar(alpha, n, k);
      const double t = acc + term;
      comp += std::abs(acc) >= std::abs(term) ? (acc - t) + term : (term - t) + acc;
      acc = t;
      low[static_cast<std::size_t>(k + 1)] = low[static_cast<std::size_t>(k)] + (2.0 * k + 1.0) * s1 - (acc + comp);
    }
  }
  std::vector<double> out(static_cast<std::size_t>(k_max + 1), 0.0);
  for (int k = 0; k <= k_max; ++k) {
    const int m = std::min(k, n - k);
    out[static_cast<std::size_t>(k)] = m <= top ? low[static_cast<std::size_t>(m)] : 0.0;
  }
  return out;
}

/// Block coefficients of the homogeneous-potential Hessian for mode k.
struct CelestialCoeffs {
  double alpha_k = 0.0;
  double beta_k = 0.0;
  double gamma_k = 0.0;
  double s1 = 0.0;
  double sk = 0.0;
};

inline CelestialCoeffs celestial_coeffs(double alpha, int n, int k) {
  detail::require_alpha(alpha);
  if (n < 2) throw DomainError("celestial coefficients need n >= 2");
  const double a_minus = (alpha - 1.0) / 2.0;
  const double a_plus = (alpha + 1.0) / 2.0;
  CelestialCoeffs c;
  c.s1 = s_sum(alpha, n, 1);
  c.sk = s_sum(alpha, n, k);
  const double up = s_sum(alpha, n, k + 1);
  const double down = s_sum(alpha, n, k - 1);
  c.alpha_k = a_minus / 2.0 * (up + down);
  c.beta_k = a_plus * (c.sk - c.s1);
  c.gamma_k = a_minus / 2.0 * (up - down);
  return c;
}

/// Block coefficients of the dNLS ring; delta_k is the threshold that
/// mu^2 h'(mu^2) has to reach for mode k to change sign.
struct DnlsCoeffs {
  double alpha_k = 0.0;
  double gamma_k = 0.0;
  double delta_k = 0.0;
};

inline double dnls_alpha(int n, int k) {
  const double s = sin_pi_ratio(k, n);
  return 4.0 * cos_pi_ratio(2, n) * s * s;
}

inline double dnls_gamma(int n, int k) { return 2.0 * sin_pi_ratio(2LL * k, n) * sin_pi_ratio(2, n); }

/// delta_k = (alpha_k^2 - gamma_k^2) / (2 alpha_k), evaluated in the
/// factored form 2 (sin^2(k zeta/2) - sin^2 zeta) / cos zeta.
inline DnlsCoeffs dnls_coeffs(int n, int k) {
  if (n < 3) throw DomainError("dNLS ring needs n >= 3");
  DnlsCoeffs c;
  c.alpha_k = dnls_alpha(n, k);
  c.gamma_k = dnls_gamma(n, k);
  if (c.alpha_k == 0.0) {
    throw DegenerateMode("alpha_k vanishes for n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                         "; delta_k is undefined");
  }
  const int kr = reduce_mode(k, n);
  if (2 * kr == n) {
    c.delta_k = c.alpha_k / 2.0;
    return c;
  }
  const double sk = sin_pi_ratio(kr, n);
  const double s1 = sin_pi_ratio(2, n);
  c.delta_k = 2.0 * (sk * sk - s1 * s1) / cos_pi_ratio(2, n);
  return c;
}

} // namespace ringbif
