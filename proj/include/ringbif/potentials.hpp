#pragma once

// Potentials of the two families, their gradients and Hessians, the
// closed-form Hessian at the polygon and a finite-difference oracle.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ringbif/errors.hpp"
#include "ringbif/sums.hpp"
#include "ringbif/system.hpp"

namespace ringbif {

/// Pairwise distances below this are treated as collisions.
inline constexpr double kCollisionDistance = 1e-9;

/// 2x2 rotation e^{J theta} with J = [[0,-1],[1,0]].
inline Eigen::Matrix2d rot(double theta) {
  Eigen::Matrix2d m;
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return m;
}

inline Eigen::Matrix2d reflect_r() { return Eigen::Vector2d(1.0, -1.0).asDiagonal(); }

/// Polygon equilibrium a_j = e^{i j zeta} (plus a_0 = 0 with a centre) and
/// the matching frequency.
struct PolygonState {
  Configuration x;
  double omega = 0.0;
};

inline Configuration polygon_points(const SystemSpec& spec) {
  Configuration x = Configuration::zeros(spec.num_points(), spec.has_center());
  for (int j = 1; j <= spec.n; ++j) x.set_point(x.ring_index(j), std::polar(1.0, j * spec.zeta()));
  return x;
}

inline PolygonState polygon_config(const SystemSpec& spec) {
  spec.validate();
  return {polygon_points(spec), spec.omega()};
}

namespace detail {

inline double point_mass(const SystemSpec& spec, int p) { return p == 0 ? spec.mu : 1.0; }

/// phi_alpha with phi' = -1/r^alpha.
inline double pair_potential(double alpha, double r) {
  if (alpha == 1.0) return -std::log(r);
  return std::pow(r, 1.0 - alpha) / (alpha - 1.0);
}

inline void require_no_collision(double r, int i, int j) {
  if (r < kCollisionDistance) {
    throw SingularInput("collision between points " + std::to_string(i) + " and " + std::to_string(j));
  }
}

/// G(u) = 1/2 int_0^u h(mu^2 t) dt, so that grad G(|x|^2) = h(|mu x|^2) x.
/// Closed forms for the built-in potentials; Gauss-Kronrod for custom ones.
inline double onsite_integral(const DnlsPotential& pot, double mu, double u) {
  if (u == 0.0) return 0.0;
  const double m2 = mu * mu;
  switch (pot.kind) {
  case PotentialKind::cubic: return 0.25 * m2 * u * u;
  case PotentialKind::saturable: return m2 == 0.0 ? 0.5 * u : 0.5 * std::log1p(m2 * u) / m2;
  case PotentialKind::custom: break;
  }
  auto f = [&](double t) { return pot.h(m2 * t); };
  return 0.5 * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, u, 8, 1e-14);
}

} // namespace detail

/// Scalar potential. Celestial: omega/2 x^T M x + sum_{i<j} mu_i mu_j phi(|x_i - x_j|).
/// dNLS: sum_j H(x_j) - 1/2 sum_j |x_{j+1} - x_j|^2 with grad H = (omega + h(|mu x|^2)) x.
inline double potential_value(const SystemSpec& spec, const Configuration& x) {
  const double omega = spec.omega();
  double value = 0.0;
  if (spec.is_celestial()) {
    const int m = x.num_points();
    for (int i = 0; i < m; ++i) value += 0.5 * omega * detail::point_mass(spec, i) * std::norm(x.point(i));
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const double r = std::abs(x.point(i) - x.point(j));
        detail::require_no_collision(r, i, j);
        value += detail::point_mass(spec, i) * detail::point_mass(spec, j) * detail::pair_potential(spec.alpha(), r);
      }
    }
    return value;
  }
  const auto& pot = spec.potential();
  for (int j = 1; j <= spec.n; ++j) {
    const double u = std::norm(x.ring(j));
    value += 0.5 * omega * u + detail::onsite_integral(pot, spec.mu, u);
    value -= 0.5 * std::norm(x.ring(j + 1) - x.ring(j));
  }
  return value;
}

inline Eigen::VectorXd gradient(const SystemSpec& spec, const Configuration& x) {
  const double omega = spec.omega();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.coords.size());
  auto add = [&g](int p, cplx v) {
    g(2 * p) += v.real();
    g(2 * p + 1) += v.imag();
  };
  if (spec.is_celestial()) {
    const double alpha = spec.alpha();
    const int m = x.num_points();
    for (int i = 0; i < m; ++i) add(i, omega * detail::point_mass(spec, i) * x.point(i));
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const cplx d = x.point(i) - x.point(j);
        const double r = std::abs(d);
        detail::require_no_collision(r, i, j);
        const cplx f = detail::point_mass(spec, i) * detail::point_mass(spec, j) * d / std::pow(r, alpha + 1.0);
        add(i, -f);
        add(j, f);
      }
    }
    return g;
  }
  const auto& pot = spec.potential();
  const double m2 = spec.mu * spec.mu;
  for (int j = 1; j <= spec.n; ++j) {
    const cplx xj = x.ring(j);
    const cplx lap = x.ring(j + 1) - 2.0 * xj + x.ring(j - 1);
    add(x.ring_index(j), (omega + pot.h(m2 * std::norm(xj))) * xj + lap);
  }
  return g;
}

/// Derivative of the gradient with respect to mu at fixed x (omega follows mu).
inline Eigen::VectorXd gradient_mu_derivative(const SystemSpec& spec, const Configuration& x) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.coords.size());
  auto add = [&g](int p, cplx v) {
    g(2 * p) += v.real();
    g(2 * p + 1) += v.imag();
  };
  if (spec.is_celestial()) {
    const double alpha = spec.alpha();
    const double omega = spec.omega();
    // d omega / d mu = 1 on every point, and the centre mass mu enters its own terms.
    for (int p = 0; p < x.num_points(); ++p) add(p, detail::point_mass(spec, p) * x.point(p));
    add(0, omega * x.point(0));
    for (int j = 1; j < x.num_points(); ++j) {
      const cplx d = x.point(0) - x.point(j);
      const double r = std::abs(d);
      detail::require_no_collision(r, 0, j);
      const cplx f = d / std::pow(r, alpha + 1.0);
      add(0, -f);
      add(j, f);
    }
    return g;
  }
  const auto& pot = spec.potential();
  const double mu = spec.mu;
  const double m2 = mu * mu;
  const double domega = -2.0 * mu * pot.dh(m2);
  for (int j = 1; j <= spec.n; ++j) {
    const cplx xj = x.ring(j);
    const double u = std::norm(xj);
    add(x.ring_index(j), (domega + 2.0 * mu * u * pot.dh(m2 * u)) * xj);
  }
  return g;
}

/// Exact Hessian of the potential at an arbitrary configuration.
inline Eigen::MatrixXd hessian(const SystemSpec& spec, const Configuration& x) {
  const int dim = static_cast<int>(x.coords.size());
  const double omega = spec.omega();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  if (spec.is_celestial()) {
    const double alpha = spec.alpha();
    const int m = x.num_points();
    for (int i = 0; i < m; ++i) H.block<2, 2>(2 * i, 2 * i) += omega * detail::point_mass(spec, i) * I;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const cplx dz = x.point(i) - x.point(j);
        const double r = std::abs(dz);
        detail::require_no_collision(r, i, j);
        const Eigen::Vector2d d(dz.real(), dz.imag());
        const Eigen::Matrix2d pair = detail::point_mass(spec, i) * detail::point_mass(spec, j) *
                                     ((alpha + 1.0) * std::pow(r, -alpha - 3.0) * d * d.transpose() -
                                      std::pow(r, -alpha - 1.0) * I);
        H.block<2, 2>(2 * i, 2 * i) += pair;
        H.block<2, 2>(2 * j, 2 * j) += pair;
        H.block<2, 2>(2 * i, 2 * j) -= pair;
        H.block<2, 2>(2 * j, 2 * i) -= pair;
      }
    }
    return H;
  }
  const auto& pot = spec.potential();
  const double m2 = spec.mu * spec.mu;
  for (int j = 1; j <= spec.n; ++j) {
    const int p = x.ring_index(j);
    const cplx xj = x.ring(j);
    const double u = std::norm(xj);
    const Eigen::Vector2d v(xj.real(), xj.imag());
    H.block<2, 2>(2 * p, 2 * p) += (omega + pot.h(m2 * u) - 2.0) * I + 2.0 * m2 * pot.dh(m2 * u) * v * v.transpose();
    H.block<2, 2>(2 * p, 2 * x.ring_index(j + 1)) += I;
    H.block<2, 2>(2 * p, 2 * x.ring_index(j - 1)) += I;
  }
  return H;
}

/// 2x2 sub-blocks of the Hessian at the polygon that generate the whole
/// matrix through the ring symmetry. Anj[j-1] holds A_{nj}, j = 1..n-1.
/// A00 and An0 are zero for rings without a centre.
struct HessianBlocks {
  Eigen::Matrix2d A00 = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d An0 = Eigen::Matrix2d::Zero();
  std::vector<Eigen::Matrix2d> Anj;
  Eigen::Matrix2d Ann = Eigen::Matrix2d::Zero();
  bool has_center = true;
  int n = 0;
};

/// Closed-form blocks at the polygon.
inline HessianBlocks hessian_analytic(const SystemSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const double mu = spec.mu;
  const double zeta = spec.zeta();
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d R = reflect_r();
  HessianBlocks b;
  b.n = n;
  b.has_center = spec.has_center();
  b.Anj.assign(static_cast<std::size_t>(n - 1), Eigen::Matrix2d::Zero());

  if (spec.is_celestial()) {
    const double alpha = spec.alpha();
    const double s1 = s_sum(alpha, n, 1);
    const double am = (alpha - 1.0) / 2.0;
    const double ap = (alpha + 1.0) / 2.0;
    if (n == 2) {
      const Eigen::Matrix2d diag_a = Eigen::Vector2d(alpha, -1.0).asDiagonal();
      b.An0 = -mu * diag_a;
      b.Anj[0] = -std::pow(2.0, -(alpha + 1.0)) * diag_a;
      b.A00 = (s1 + mu) * mu * I - 2.0 * b.An0;
      b.Ann = (s1 + mu) * I - (b.An0 + b.Anj[0]);
      return b;
    }
    b.A00 = mu * (s1 + mu + am * n) * I;
    b.An0 = -mu * (am * I + ap * R);
    Eigen::Matrix2d sum = b.An0;
    for (int j = 1; j < n; ++j) {
      const double scale = std::pow(2.0 * std::sin(j * zeta / 2.0), -(alpha + 1.0));
      b.Anj[static_cast<std::size_t>(j - 1)] = scale * (-am * I + ap * rot(j * zeta) * R);
      sum += b.Anj[static_cast<std::size_t>(j - 1)];
    }
    b.Ann = (s1 + mu) * I - sum;
    return b;
  }

  const double m2 = mu * mu;
  b.Anj.front() = I;
  b.Anj.back() = I;
  b.Ann = -2.0 * std::cos(zeta) * I;
  b.Ann(0, 0) += 2.0 * m2 * spec.potential().dh(m2);
  return b;
}

/// Full Hessian from its generating blocks: A_{lj} = e^{lJ zeta} A_{n,j-l} e^{-lJ zeta},
/// A_{l0} = e^{lJ zeta} A_{n0} e^{-lJ zeta}.
inline Eigen::MatrixXd assemble(const HessianBlocks& b) {
  const int n = b.n;
  const int off = b.has_center ? 1 : 0;
  const int dim = 2 * (n + off);
  const double zeta = 2.0 * std::numbers::pi / n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  auto ring_block = [&](int d) -> const Eigen::Matrix2d& {
    const int r = reduce_mode(d, n);
    return r == 0 ? b.Ann : b.Anj[static_cast<std::size_t>(r - 1)];
  };
  auto idx = [&](int j) { return 2 * (reduce_mode(j - 1, n) + off); };
  for (int l = 1; l <= n; ++l) {
    const Eigen::Matrix2d Q = rot(l * zeta);
    for (int j = 1; j <= n; ++j) A.block<2, 2>(idx(l), idx(j)) = Q * ring_block(j - l) * Q.transpose();
    if (b.has_center) {
      const Eigen::Matrix2d Al0 = Q * b.An0 * Q.transpose();
      A.block<2, 2>(idx(l), 0) = Al0;
      A.block<2, 2>(0, idx(l)) = Al0.transpose();
    }
  }
  if (b.has_center) A.block<2, 2>(0, 0) = b.A00;
  return A;
}

/// Symmetric central-difference Hessian of potential_value. With
/// `richardson`, the h and 2h stencils are combined to cancel the O(h^2) term.
inline Eigen::MatrixXd hessian_fd(const SystemSpec& spec, const Configuration& x, double step = 1e-3,
                                  bool richardson = true) {
  if (!(step >= 1e-7 && step <= 1e-3)) throw DomainError("finite-difference step must lie in [1e-7, 1e-3]");
  const int dim = static_cast<int>(x.coords.size());
  auto second_differences = [&](double h) {
    Eigen::MatrixXd H(dim, dim);
    Configuration y = x;
    auto V = [&](int i, double di, int j, double dj) {
      y.coords = x.coords;
      y.coords(i) += di;
      y.coords(j) += dj;
      return potential_value(spec, y);
    };
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) {
        const double v = (V(i, h, j, h) - V(i, h, j, -h) - V(i, -h, j, h) + V(i, -h, j, -h)) / (4.0 * h * h);
        H(i, j) = v;
        H(j, i) = v;
      }
    }
    return H;
  };
  if (!richardson) return second_differences(step);
  const Eigen::MatrixXd fine = second_differences(step);
  const Eigen::MatrixXd coarse = second_differences(2.0 * step);
  return (4.0 * fine - coarse) / 3.0;
}

} // namespace ringbif
