#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ringbif/sums.hpp"

using namespace ringbif;

TEST(TrigRatios, MatchLibmAndAreExactAtRationalPoints) {
  EXPECT_EQ(sin_pi_ratio(1, 1), 0.0);
  EXPECT_EQ(sin_pi_ratio(1, 2), 1.0);
  EXPECT_EQ(sin_pi_ratio(3, 2), -1.0);
  EXPECT_EQ(cos_pi_ratio(1, 2), 0.0);
  EXPECT_EQ(cos_pi_ratio(2, 4), 0.0);
  for (int n = 1; n <= 30; ++n) {
    for (int m = -3 * n; m <= 3 * n; ++m) {
      EXPECT_NEAR(sin_pi_ratio(m, n), std::sin(std::numbers::pi * m / n), 1e-14);
      EXPECT_NEAR(cos_pi_ratio(m, n), std::cos(std::numbers::pi * m / n), 1e-14);
    }
  }
}

TEST(SSum, HandValues) {
  EXPECT_NEAR(s_sum(1.0, 5, 2), 3.0, 1e-13);
  EXPECT_EQ(s_sum(2.0, 3, 0), 0.0);
  EXPECT_NEAR(s_sum(2.0, 3, 1), 1.0 / std::sqrt(3.0), 1e-15);
}

TEST(SSum, RejectsAlphaBelowOne) {
  EXPECT_THROW(s_sum(0.5, 5, 1), DomainError);
  EXPECT_THROW(s_bar(0.99, 5, 1), DomainError);
}

TEST(SSum, VortexClosedForm) {
  for (int n = 3; n <= 64; ++n) {
    for (int k = 0; k <= n; ++k) EXPECT_NEAR(s_sum(1.0, n, k), k * (n - k) / 2.0, 1e-12) << n << ' ' << k;
  }
}

TEST(SSum, MatchesLongDoubleOracle) {
  for (double alpha : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    for (int n : {2, 3, 5, 8, 13, 32, 101}) {
      for (int k = 0; k <= n; ++k) {
        const double ref = oracle::s(alpha, n, k);
        EXPECT_NEAR(s_sum(alpha, n, k), ref, 1e-13 * (1.0 + std::abs(ref)));
        const double refbar = oracle::sbar(alpha, n, k);
        EXPECT_NEAR(s_bar(alpha, n, k), refbar, 1e-13 * (1.0 + std::abs(refbar)));
      }
    }
  }
}

TEST(SSum, PeriodicityAndReflection) {
  for (double alpha : {1.0, 2.0, 3.3}) {
    for (int n = 2; n <= 40; ++n) {
      EXPECT_EQ(s_sum(alpha, n, 0), 0.0);
      EXPECT_EQ(s_sum(alpha, n, n), 0.0);
      for (int k = 0; k <= n; ++k) {
        const double sk = s_sum(alpha, n, k);
        EXPECT_GE(sk, 0.0);
        EXPECT_NEAR(sk, s_sum(alpha, n, n - k), 1e-13 * (1.0 + sk));
        EXPECT_NEAR(sk, s_sum(alpha, n, n + k), 1e-13 * (1.0 + sk));
        EXPECT_NEAR(sk, s_sum(alpha, n, -k), 1e-13 * (1.0 + sk));
      }
    }
  }
}

TEST(SBar, VortexEqualsN) {
  for (int n = 3; n <= 40; ++n) {
    for (int k = 1; k < n; ++k) EXPECT_NEAR(s_bar(1.0, n, k), n, 1e-11 * n);
    EXPECT_EQ(s_bar(1.0, n, 0), 0.0);
  }
}

TEST(SBar, EqualsShiftedExponent) {
  EXPECT_NEAR(s_bar(3.0, 9, 4), s_sum(1.0, 9, 4), 1e-13);
  EXPECT_NEAR(s_bar(1.0, 5, 3), oracle::sbar(1.0, 5, 3), 1e-13);
}

TEST(SBar, SecondDifferenceIdentity) {
  for (double alpha : {1.0, 1.7, 2.0, 3.0, 4.0}) {
    for (int n = 3; n <= 48; ++n) {
      const double s1 = s_sum(alpha, n, 1);
      for (int k = 1; k < n; ++k) {
        const double lhs = s_sum(alpha, n, k + 1) - 2.0 * s_sum(alpha, n, k) + s_sum(alpha, n, k - 1);
        EXPECT_NEAR(lhs, 2.0 * s1 - s_bar(alpha, n, k), 1e-12 * (1.0 + s1));
      }
    }
  }
}

TEST(SBar, FourSkMinusSbarPositive) {
  for (double alpha : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    for (int n = 3; n <= 64; ++n) {
      for (int k = 1; k < n; ++k) EXPECT_GT(4.0 * s_sum(alpha, n, k) - s_bar(alpha, n, k), 0.0) << alpha << ' ' << n << ' ' << k;
    }
  }
}

TEST(Recurrence, SmallCases) {
  const auto v = s_via_recurrence(1.0, 7, 3);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_NEAR(v[0], 0.0, 1e-15);
  EXPECT_NEAR(v[1], 3.0, 1e-13);
  EXPECT_NEAR(v[2], 5.0, 1e-13);
  EXPECT_NEAR(v[3], 6.0, 1e-13);
  const auto base = s_via_recurrence(2.5, 9, 1);
  ASSERT_EQ(base.size(), 2u);
  EXPECT_EQ(base[1], s_sum(2.5, 9, 1));
  const auto six = s_via_recurrence(2.0, 6, 3);
  for (int k = 0; k <= 3; ++k) EXPECT_NEAR(six[k], oracle::s(2.0, 6, k), 1e-13);
  EXPECT_THROW(s_via_recurrence(2.0, 6, 7), DomainError);
}

TEST(Recurrence, AgreesWithDirectSumOnGrid) {
  for (double alpha : {1.0, 1.25, 2.0, 2.5, 3.0, 3.75, 4.0}) {
    for (int n = 3; n <= 64; ++n) {
      const auto rec = s_via_recurrence(alpha, n, n);
      for (int k = 0; k <= n; ++k) {
        const double direct = s_sum(alpha, n, k);
        EXPECT_LE(std::abs(rec[k] - direct), 1e-12 * (1.0 + std::abs(direct))) << alpha << ' ' << n << ' ' << k;
      }
    }
  }
}

TEST(CelestialCoeffs, VortexReducesToBetaOnly) {
  const auto c = celestial_coeffs(1.0, 8, 3);
  EXPECT_EQ(c.alpha_k, 0.0);
  EXPECT_EQ(c.gamma_k, 0.0);
  EXPECT_NEAR(c.beta_k, 4.0, 1e-13);
  for (int n = 3; n <= 20; ++n) {
    for (int k = 1; k <= n; ++k) {
      const auto v = celestial_coeffs(1.0, n, k);
      EXPECT_NEAR(v.beta_k, v.sk - v.s1, 1e-13);
    }
  }
}

TEST(CelestialCoeffs, ModeN) {
  for (double alpha : {1.0, 2.0, 2.5}) {
    for (int n = 3; n <= 12; ++n) {
      const auto c = celestial_coeffs(alpha, n, n);
      EXPECT_NEAR(c.beta_k, -(alpha + 1.0) / 2.0 * c.s1, 1e-13);
      EXPECT_NEAR(c.alpha_k, (alpha - 1.0) / 2.0 * c.s1, 1e-13);
    }
  }
}

TEST(CelestialCoeffs, BodyFiveTwoFromOracle) {
  const auto c = celestial_coeffs(2.0, 5, 2);
  const double s1 = oracle::s(2.0, 5, 1), s2 = oracle::s(2.0, 5, 2), s3 = oracle::s(2.0, 5, 3);
  EXPECT_NEAR(c.alpha_k, 0.25 * (s3 + s1), 1e-13);
  EXPECT_NEAR(c.beta_k, 1.5 * (s2 - s1), 1e-13);
  EXPECT_NEAR(c.gamma_k, 0.25 * (s3 - s1), 1e-13);
}

TEST(DnlsCoeffs, KnownValues) {
  const auto c63 = dnls_coeffs(6, 3);
  EXPECT_NEAR(c63.alpha_k, 2.0, 1e-14);
  EXPECT_NEAR(c63.gamma_k, 0.0, 1e-14);
  EXPECT_NEAR(c63.delta_k, 1.0, 1e-14);
  EXPECT_NEAR(dnls_coeffs(6, 2).delta_k, 0.0, 1e-14);
  // n = 16: 2 (sin^2(pi/16) - sin^2(pi/8)) / cos(pi/8), evaluated in long double.
  const long double pi = std::numbers::pi_v<long double>;
  const long double a = std::sin(pi / 16), b = std::sin(pi / 8);
  const double d1 = static_cast<double>(2.0L * (a * a - b * b) / std::cos(pi / 8));
  EXPECT_NEAR(dnls_coeffs(16, 1).delta_k, d1, 1e-15);
  EXPECT_NEAR(d1, -0.23463, 1e-5);
  EXPECT_GT(d1, -0.25);
}

TEST(DnlsCoeffs, DeltaMatchesDefinitionAndSigns) {
  for (int n = 5; n <= 64; ++n) {
    const double zeta = 2.0 * std::numbers::pi / n;
    EXPECT_LE(std::abs(dnls_coeffs(n, 2).delta_k), 1e-14);
    for (int k = 1; 2 * k <= n; ++k) {
      const auto c = dnls_coeffs(n, k);
      EXPECT_GE(c.alpha_k, 0.0);
      if (2 * k < n) {
        const double def = (c.alpha_k * c.alpha_k - c.gamma_k * c.gamma_k) / (2.0 * c.alpha_k);
        EXPECT_NEAR(c.delta_k, def, 1e-12);
      }
      const double ref = std::pow(std::sin(k * zeta / 2), 2) - std::pow(std::sin(zeta), 2);
      if (std::abs(ref) > 1e-12) EXPECT_EQ(std::signbit(c.delta_k), std::signbit(ref)) << n << ' ' << k;
      if (k == 1) EXPECT_LT(c.delta_k, 0.0);
      if (k >= 3) EXPECT_GT(c.delta_k, 0.0);
    }
  }
}

TEST(DnlsCoeffs, DegenerateModeThrows) {
  // n = 4: cos(zeta) = 0 so every alpha_k vanishes exactly.
  EXPECT_EQ(dnls_alpha(4, 1), 0.0);
  EXPECT_EQ(dnls_alpha(4, 2), 0.0);
  EXPECT_THROW(dnls_coeffs(4, 1), DegenerateMode);
  EXPECT_THROW(dnls_coeffs(2, 1), DomainError);
}
