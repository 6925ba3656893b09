#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "ringbif/potentials.hpp"

using namespace ringbif;
using testing_helpers::families;
using testing_helpers::jittered;

namespace {

Configuration rotated(const Configuration& x, double theta) {
  Configuration y = x;
  for (int p = 0; p < x.num_points(); ++p) y.set_point(p, std::polar(1.0, theta) * x.point(p));
  return y;
}

// Cyclic relabelling of the ring members (centre untouched).
Configuration shifted(const Configuration& x, int s) {
  Configuration y = x;
  for (int j = 1; j <= x.ring_size(); ++j) y.set_point(y.ring_index(j), x.ring(j + s));
  return y;
}

double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

const double kMus[] = {-2.0, -0.5, 0.0, 0.5, 1.0, 5.0};

} // namespace

TEST(Polygon, Frequencies) {
  EXPECT_NEAR(polygon_config(SystemSpec::vortex(3, 1.0)).omega, 2.0, 1e-14);
  EXPECT_NEAR(polygon_config(SystemSpec::dnls(DnlsPotential::cubic(), 4, 0.0)).omega, 2.0, 1e-14);
  EXPECT_NEAR(polygon_config(SystemSpec::body(3, 0.5)).omega, 0.5 + oracle::s(2.0, 3, 1), 1e-14);
}

TEST(Polygon, OmegaFollowsMu) {
  const auto s = SystemSpec::body(5, 0.3);
  EXPECT_NEAR(s.with_mu(1.3).omega() - s.omega(), 1.0, 1e-14);
}

TEST(Polygon, GradientVanishesOnGrid) {
  for (int n = 2; n <= 32; ++n) {
    for (double mu : kMus) {
      for (const auto& spec : families(n, mu)) {
        const auto st = polygon_config(spec);
        EXPECT_LE(gradient(spec, st.x).norm(), 1e-12 * n) << spec.family_name() << " n=" << n << " mu=" << mu;
      }
    }
  }
}

TEST(Potential, VortexTriangleHandValue) {
  const auto spec = SystemSpec::vortex(3, 1.0);
  EXPECT_NEAR(potential_value(spec, polygon_points(spec)), 3.0 - 1.5 * std::log(3.0), 1e-13);
}

TEST(Potential, CubicDnlsHandValue) {
  // H(x) = omega/2 |x|^2 + mu^2 |x|^4 / 4 for h(u) = u.
  const auto spec = SystemSpec::dnls(DnlsPotential::cubic(), 4, 0.7);
  Configuration x = polygon_points(spec);
  x.coords *= 1.3;
  double ref = 0.0;
  const double u = 1.69;
  ref += 4.0 * (0.5 * spec.omega() * u + 0.49 * u * u / 4.0);
  ref -= 0.5 * 4.0 * 2.0 * u;  // |x_{j+1} - x_j|^2 = 2u on the square
  EXPECT_NEAR(potential_value(spec, x), ref, 1e-12);
}

TEST(Potential, RotationAndRelabelInvariance) {
  for (const auto& spec : families(5, 0.8)) {
    const Configuration x = jittered(polygon_points(spec), 0.1, 7);
    const double v = potential_value(spec, x);
    EXPECT_NEAR(potential_value(spec, rotated(x, 0.37)), v, 1e-12 * (1.0 + std::abs(v)));
    EXPECT_NEAR(potential_value(spec, shifted(x, 2)), v, 1e-12 * (1.0 + std::abs(v)));
  }
}

TEST(Potential, CollisionThrows) {
  const auto spec = SystemSpec::body(3, 1.0);
  Configuration x = polygon_points(spec);
  x.set_point(2, x.point(1));
  EXPECT_THROW(potential_value(spec, x), SingularInput);
  EXPECT_THROW(gradient(spec, x), SingularInput);
  EXPECT_THROW(hessian(spec, x), SingularInput);
}

TEST(Gradient, MatchesFiniteDifferences) {
  for (int n : {2, 3, 5, 7}) {
    for (const auto& spec : families(n, 0.6)) {
      const Configuration x = jittered(polygon_points(spec), 0.15, 11 + n);
      const Eigen::VectorXd g = gradient(spec, x);
      const double h = 1e-6;
      for (int i = 0; i < x.coords.size(); ++i) {
        Configuration p = x, m = x;
        p.coords(i) += h;
        m.coords(i) -= h;
        const double fd = (potential_value(spec, p) - potential_value(spec, m)) / (2.0 * h);
        EXPECT_NEAR(g(i), fd, 1e-6) << spec.family_name() << " n=" << n << " i=" << i;
      }
    }
  }
}

TEST(Gradient, Equivariance) {
  for (const auto& spec : families(6, -0.5)) {
    const Configuration x = jittered(polygon_points(spec), 0.1, 3);
    const Configuration gx(gradient(spec, x), x.has_center);
    const double theta = 2.0 * std::numbers::pi / 6;
    EXPECT_LE((gradient(spec, rotated(x, theta)) - rotated(gx, theta).coords).norm(), 1e-12);
    EXPECT_LE((gradient(spec, shifted(x, 1)) - shifted(gx, 1).coords).norm(), 1e-12);
  }
}

TEST(Gradient, MuDerivativeMatchesFiniteDifferences) {
  for (int n : {2, 4, 6}) {
    for (const auto& spec : families(n, 0.9)) {
      const Configuration x = jittered(polygon_points(spec), 0.1, 5 + n);
      const double h = 1e-6;
      const Eigen::VectorXd fd =
          (gradient(spec.with_mu(spec.mu + h), x) - gradient(spec.with_mu(spec.mu - h), x)) / (2.0 * h);
      EXPECT_LE((gradient_mu_derivative(spec, x) - fd).norm(), 1e-7) << spec.family_name() << " n=" << n;
    }
  }
}

TEST(Hessian, ExactMatchesFdAtRandomPoints) {
  for (int n : {2, 3, 5}) {
    for (const auto& spec : families(n, 1.2)) {
      const Configuration x = jittered(polygon_points(spec), 0.1, 21 + n);
      const Eigen::MatrixXd H = hessian(spec, x);
      EXPECT_LE((H - H.transpose()).norm(), 1e-13);
      EXPECT_LE(rel_frobenius(hessian_fd(spec, x), H), 1e-6) << spec.family_name() << " n=" << n;
    }
  }
}

TEST(Hessian, AnalyticBlocksMatchExactAndFd) {
  for (int n : {2, 3, 4, 7, 10}) {
    for (double mu : {-2.0, -0.5, 0.5, 1.0}) {
      for (const auto& spec : families(n, mu)) {
        const Eigen::MatrixXd A = assemble(hessian_analytic(spec));
        const Configuration a = polygon_points(spec);
        EXPECT_LE(rel_frobenius(A, hessian(spec, a)), 1e-12) << spec.family_name() << " n=" << n << " mu=" << mu;
        EXPECT_LE(rel_frobenius(A, hessian_fd(spec, a)), 1e-6) << spec.family_name() << " n=" << n << " mu=" << mu;
      }
    }
  }
}

TEST(Hessian, BodyFourEntrywiseAgainstFd) {
  const auto spec = SystemSpec::body(4, 1.0);
  const Eigen::MatrixXd A = assemble(hessian_analytic(spec));
  EXPECT_LE((A - hessian_fd(spec, polygon_points(spec))).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Hessian, CustomDnlsPotential) {
  const auto pot = DnlsPotential::custom([](double u) { return u + u * u; }, [](double u) { return 1.0 + 2.0 * u; });
  const auto spec = SystemSpec::dnls(pot, 5, 0.8);
  const Configuration a = polygon_points(spec);
  EXPECT_LE(gradient(spec, a).norm(), 1e-12);
  EXPECT_LE(rel_frobenius(assemble(hessian_analytic(spec)), hessian_fd(spec, a)), 1e-6);
}

TEST(HessianBlocks, VortexCentreCoupling) {
  const auto b = hessian_analytic(SystemSpec::vortex(5, 0.7));
  EXPECT_LE((b.An0 - (-0.7) * reflect_r()).norm(), 1e-15);
}

TEST(HessianBlocks, DnlsOnlyNearestNeighbours) {
  for (int n = 4; n <= 12; ++n) {
    const auto b = hessian_analytic(SystemSpec::dnls(DnlsPotential::cubic(), n, 0.5));
    for (int j = 2; j <= n - 2; ++j) EXPECT_EQ(b.Anj[j - 1].norm(), 0.0);
    EXPECT_EQ(b.Anj.front(), Eigen::Matrix2d::Identity());
    EXPECT_EQ(b.Anj.back(), Eigen::Matrix2d::Identity());
  }
}

TEST(HessianBlocks, RowSumIdentity) {
  for (int n = 3; n <= 16; ++n) {
    for (double alpha : {1.0, 2.0, 2.5}) {
      const auto spec = SystemSpec::celestial(alpha, n, 0.4);
      const auto b = hessian_analytic(spec);
      Eigen::Matrix2d sum = b.An0;
      for (const auto& m : b.Anj) sum += m;
      EXPECT_LE((b.Ann - ((s_sum(alpha, n, 1) + 0.4) * Eigen::Matrix2d::Identity() - sum)).norm(), 1e-12);
    }
  }
}

TEST(HessianFd, StepRange) {
  const auto spec = SystemSpec::vortex(3, 1.0);
  EXPECT_THROW(hessian_fd(spec, polygon_points(spec), 1e-2), DomainError);
  EXPECT_THROW(hessian_fd(spec, polygon_points(spec), 1e-8), DomainError);
  const Eigen::MatrixXd H = hessian_fd(spec, polygon_points(spec), 1e-4, false);
  EXPECT_LE((H - H.transpose()).norm(), 1e-8);
}
