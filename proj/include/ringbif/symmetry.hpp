#pragma once

// Group actions of S_n x O(2) on ring configurations, the symmetry-adapted
// unitary change of variables P, block extraction, fixed-point subspaces of
// the twisted dihedral subgroups and the h-gon / 2h-gon classification.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringbif/errors.hpp"
#include "ringbif/potentials.hpp"
#include "ringbif/sums.hpp"
#include "ringbif/system.hpp"

namespace ringbif {

inline constexpr double kEquivarianceTol = 1e-8;
inline constexpr double kSymmetryTol = 1e-8;

/// Element of S_n x O(2) acting on configurations.
///   zeta_power(p): (zeta, zeta)^p, ring shift combined with rotation by -p zeta;
///                  fixes the polygon.
///   kappa:         (kappa, kappa), index reversal j -> n-j combined with reflection.
///   rotation(t):   rho(t) = e^{-J t} on every point.
///   reflection:    R = diag(1, -1) on every point.
///   composite:     product g_1 g_2 ... g_m (g_m acts first).
struct GroupElement {
  enum class Tag { zeta_power, kappa, rotation, reflection, composite };
  Tag tag = Tag::zeta_power;
  int power = 0;
  double theta = 0.0;
  std::vector<GroupElement> parts;

  static GroupElement zeta_power(int p) { return {Tag::zeta_power, p, 0.0, {}}; }
  static GroupElement kappa() { return {Tag::kappa, 0, 0.0, {}}; }
  static GroupElement rotation(double t) { return {Tag::rotation, 0, t, {}}; }
  static GroupElement reflection() { return {Tag::reflection, 0, 0.0, {}}; }
  static GroupElement composite(std::vector<GroupElement> g) { return {Tag::composite, 0, 0.0, std::move(g)}; }
};

inline Configuration apply_group(const GroupElement& g, const Configuration& x) {
  const int n = x.ring_size();
  Configuration y = x;
  switch (g.tag) {
  case GroupElement::Tag::rotation: {
    const cplx phase = std::polar(1.0, -g.theta);
    for (int p = 0; p < x.num_points(); ++p) y.set_point(p, phase * x.point(p));
    return y;
  }
  case GroupElement::Tag::reflection:
    for (int p = 0; p < x.num_points(); ++p) y.set_point(p, std::conj(x.point(p)));
    return y;
  case GroupElement::Tag::zeta_power: {
    const cplx phase = std::polar(1.0, -g.power * 2.0 * std::numbers::pi / n);
    if (x.has_center) y.set_point(0, phase * x.point(0));
    for (int j = 1; j <= n; ++j) y.set_point(x.ring_index(j), phase * x.ring(j + g.power));
    return y;
  }
  case GroupElement::Tag::kappa:
    if (x.has_center) y.set_point(0, std::conj(x.point(0)));
    for (int j = 1; j <= n; ++j) y.set_point(x.ring_index(j), std::conj(x.ring(n - j)));
    return y;
  case GroupElement::Tag::composite:
    for (auto it = g.parts.rbegin(); it != g.parts.rend(); ++it) y = apply_group(*it, y);
    return y;
  }
  return y;
}

/// Orthogonal matrix of the action on the flat coordinate vector.
inline Eigen::MatrixXd action_matrix(const GroupElement& g, int n, bool has_center) {
  const int dim = 2 * (n + (has_center ? 1 : 0));
  Eigen::MatrixXd M(dim, dim);
  for (int c = 0; c < dim; ++c) {
    Configuration e(Eigen::VectorXd::Unit(dim, c), has_center);
    M.col(c) = apply_group(g, e).coords;
  }
  return M;
}

/// Complex dimension of the isotypic coordinate z_k.
inline int mode_dim(int n, int k, bool has_center) {
  const int kr = reduce_mode(k, n);
  if (!has_center) return 2;
  if (n == 2 && kr == 1) return 4;
  if (n >= 3 && (kr == 1 || kr == n - 1)) return 3;
  return 2;
}

/// Isometry T_k : C^d -> V_k as a (dim x d) complex matrix. Ring member j
/// receives n^{-1/2} e^{i j k zeta} e^{j J zeta} w; for k in {1, n-1} with a
/// centre, the first coordinate sits on the centre along v_k = (1, +-i)/sqrt 2.
/// For n = 2 with a centre, T_1(v, w) = (v, w/sqrt 2, w/sqrt 2).
inline Eigen::MatrixXcd mode_map(int n, int k, bool has_center) {
  const int kr = reduce_mode(k, n) == 0 ? n : reduce_mode(k, n);
  const int off = has_center ? 1 : 0;
  const int dim = 2 * (n + off);
  const int d = mode_dim(n, kr, has_center);
  const double zeta = 2.0 * std::numbers::pi / n;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(dim, d);
  auto ring_row = [&](int j) { return 2 * (reduce_mode(j - 1, n) + off); };

  if (has_center && n == 2 && kr == 1) {
    const double s = 1.0 / std::sqrt(2.0);
    T(0, 0) = 1.0;
    T(1, 1) = 1.0;
    for (int j = 1; j <= 2; ++j) {
      T(ring_row(j), 2) = s;
      T(ring_row(j) + 1, 3) = s;
    }
    return T;
  }
  int first_ring_col = 0;
  if (d == 3) {
    const double s = 1.0 / std::sqrt(2.0);
    T(0, 0) = s;
    T(1, 0) = kr == 1 ? cplx(0.0, s) : cplx(0.0, -s);
    first_ring_col = 1;
  }
  for (int j = 1; j <= n; ++j) {
    const cplx phase = std::polar(inv_sqrt_n, j * kr * zeta);
    const Eigen::Matrix2d Q = rot(j * zeta);
    for (int c = 0; c < 2; ++c) {
      T(ring_row(j), first_ring_col + c) = phase * Q(0, c);
      T(ring_row(j) + 1, first_ring_col + c) = phase * Q(1, c);
    }
  }
  return T;
}

/// Column order of P: conjugate pairs 1, n-1, 2, n-2, ..., then n/2 (n even), then n.
inline std::vector<int> mode_order(int n) {
  std::vector<int> order;
  for (int k = 1; 2 * k < n; ++k) {
    order.push_back(k);
    order.push_back(n - k);
  }
  if (n % 2 == 0 && n > 2) order.push_back(n / 2);
  if (n == 2) order.push_back(1);
  order.push_back(n);
  return order;
}

struct ModeSlot {
  int k = 0;
  int offset = 0;
  int dim = 0;
};

/// The unitary P (columns = stacked T_k) with the position of each mode.
struct SymmetryBasis {
  int n = 0;
  bool has_center = true;
  Eigen::MatrixXcd P;
  std::vector<ModeSlot> slots;
};

inline SymmetryBasis build_P(int n, bool has_center) {
  if (n < 2 || (!has_center && n < 3)) throw DomainError("ring too small for the symmetry basis");
  SymmetryBasis basis;
  basis.n = n;
  basis.has_center = has_center;
  const int dim = 2 * (n + (has_center ? 1 : 0));
  basis.P.resize(dim, dim);
  int offset = 0;
  for (int k : mode_order(n)) {
    const Eigen::MatrixXcd T = mode_map(n, k, has_center);
    basis.P.middleCols(offset, T.cols()) = T;
    basis.slots.push_back({k, offset, static_cast<int>(T.cols())});
    offset += static_cast<int>(T.cols());
  }
  return basis;
}

/// Largest deviation of A from commuting with (zeta, zeta) and (kappa, kappa).
inline double equivariance_residual(const Eigen::MatrixXd& A, int n, bool has_center) {
  const Eigen::MatrixXd Z = action_matrix(GroupElement::zeta_power(1), n, has_center);
  const Eigen::MatrixXd K = action_matrix(GroupElement::kappa(), n, has_center);
  return std::max((Z * A - A * Z).norm(), (K * A - A * K).norm());
}

/// Frobenius mass of P* A P outside its diagonal mode blocks.
inline double off_block_residual(const Eigen::MatrixXd& A, const SymmetryBasis& basis) {
  Eigen::MatrixXcd M = basis.P.adjoint() * A.cast<cplx>() * basis.P;
  for (const auto& s : basis.slots) M.block(s.offset, s.offset, s.dim, s.dim).setZero();
  return M.norm();
}

struct ModeBlock {
  int k = 0;
  Eigen::MatrixXcd B;
};

/// Self-adjoint blocks B_k for k in {1, ..., ceil(n/2), n}.
struct BlockSpectrum {
  int n = 0;
  bool has_center = true;
  std::vector<ModeBlock> blocks;

  const Eigen::MatrixXcd& block(int k) const {
    for (const auto& b : blocks) {
      if (b.k == k) return b.B;
    }
    throw DomainError("no block stored for mode " + std::to_string(k));
  }
};

/// Modes reported in a BlockSpectrum.
inline std::vector<int> spectrum_modes(int n) {
  std::vector<int> ks;
  for (int k = 1; k <= (n + 1) / 2; ++k) ks.push_back(k);
  if (ks.empty() || ks.back() != n) ks.push_back(n);
  return ks;
}

/// Blocks by numeric conjugation B_k = T_k* A T_k of an equivariant Hessian.
inline BlockSpectrum extract_blocks(const Eigen::MatrixXd& A, int n, bool has_center) {
  const double res = equivariance_residual(A, n, has_center);
  if (res > kEquivarianceTol * (1.0 + A.norm())) {
    throw NotEquivariant("Hessian is not ring-equivariant (residual " + std::to_string(res) + ")");
  }
  BlockSpectrum out;
  out.n = n;
  out.has_center = has_center;
  const Eigen::MatrixXcd Ac = A.cast<cplx>();
  for (int k : spectrum_modes(n)) {
    const Eigen::MatrixXcd T = mode_map(n, k, has_center);
    out.blocks.push_back({k, T.adjoint() * Ac * T});
  }
  return out;
}

/// Closed-form block B_k of the Hessian at the polygon.
inline Eigen::MatrixXcd block_formula(const SystemSpec& spec, int k) {
  const int n = spec.n;
  const int kr = reduce_mode(k, n) == 0 ? n : reduce_mode(k, n);
  const double mu = spec.mu;
  const Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd R = reflect_r().cast<cplx>();
  Eigen::Matrix2cd iJ;
  iJ << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  Eigen::Matrix2cd E11 = Eigen::Matrix2cd::Zero();
  E11(0, 0) = 1.0;

  if (!spec.is_celestial()) {
    const double m2 = mu * mu;
    return -dnls_alpha(n, kr) * I + dnls_gamma(n, kr) * iJ + 2.0 * m2 * spec.potential().dh(m2) * E11;
  }
  const double alpha = spec.alpha();
  const double s1 = s_sum(alpha, n, 1);
  const double am = (alpha - 1.0) / 2.0;
  const double ap = (alpha + 1.0) / 2.0;

  if (n == 2) {
    if (kr == 2) return (alpha + 1.0) * (mu + s1) * E11;
    const double r2 = std::sqrt(2.0);
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(4, 4);
    B(0, 0) = mu * (s1 + mu + 2.0 * alpha);
    B(1, 1) = mu * (s1 + mu - 2.0);
    B(0, 2) = B(2, 0) = -r2 * alpha * mu;
    B(1, 3) = B(3, 1) = r2 * mu;
    B(2, 2) = s1 + (alpha + 1.0) * mu;
    B(3, 3) = s1;
    return B;
  }
  if (kr == 1 || kr == n - 1) {
    const double a1 = celestial_coeffs(alpha, n, 1).alpha_k;
    const double c = std::sqrt(n / 2.0) * mu;
    const cplx i(0.0, 1.0);
    Eigen::MatrixXcd B(3, 3);
    B << mu * (s1 + mu + n * am), -c * alpha, -c * i,
        -c * alpha, s1 + a1 + (alpha + 1.0) * mu, a1 * i,
        c * i, -a1 * i, s1 + a1;
    return kr == 1 ? B : Eigen::MatrixXcd(B.conjugate());
  }
  const CelestialCoeffs cf = celestial_coeffs(alpha, n, kr);
  return ap * mu * (I + R) + (s1 + cf.alpha_k) * I - cf.beta_k * R - cf.gamma_k * iJ;
}

/// All closed-form blocks, in the same layout as extract_blocks.
inline BlockSpectrum formula_blocks(const SystemSpec& spec) {
  BlockSpectrum out;
  out.n = spec.n;
  out.has_center = spec.has_center();
  for (int k : spectrum_modes(spec.n)) out.blocks.push_back({k, block_formula(spec, k)});
  return out;
}

/// Orthonormal real basis of the fixed-point space of D~_h, generated by
/// (n/h)(zeta, zeta) and (kappa, kappa). Coordinates z_k survive for
/// k in hN cap [1, n/2] and k = n, constrained by z_k = R conj(z_k).
struct FixedSubspace {
  int n = 0;
  int h = 0;
  bool has_center = true;
  Eigen::MatrixXd basis;
  std::vector<ModeSlot> layout;

  int dim() const { return static_cast<int>(basis.cols()); }
  Eigen::MatrixXd projector() const { return basis * basis.transpose(); }
};

inline std::vector<int> fixed_modes(int n, int h) {
  std::vector<int> ks;
  for (int k = h; 2 * k <= n; k += h) ks.push_back(k);
  ks.push_back(n);
  return ks;
}

inline FixedSubspace fixed_subspace_basis(int n, int h, bool has_center) {
  if (h < 1 || n % h != 0) {
    throw InvalidDivisor(std::to_string(h) + " does not divide " + std::to_string(n));
  }
  FixedSubspace fs;
  fs.n = n;
  fs.h = h;
  fs.has_center = has_center;
  std::vector<Eigen::VectorXd> cols;
  const double r2 = std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  for (int k : fixed_modes(n, h)) {
    const Eigen::MatrixXcd T = mode_map(n, k, has_center);
    const int start = static_cast<int>(cols.size());
    if (has_center && n == 2 && k == 1) {
      cols.push_back(T.col(0).real());
      cols.push_back(T.col(2).real());
    } else if (k == n || 2 * k == n) {
      cols.push_back(T.col(0).real());
    } else if (T.cols() == 3) {
      cols.push_back(r2 * T.col(0).real());
      cols.push_back(r2 * T.col(1).real());
      cols.push_back(r2 * (i * T.col(2)).real());
    } else {
      cols.push_back(r2 * T.col(0).real());
      cols.push_back(r2 * (i * T.col(1)).real());
    }
    fs.layout.push_back({k, start, static_cast<int>(cols.size()) - start});
  }
  fs.basis.resize(static_cast<Eigen::Index>(2 * (n + (has_center ? 1 : 0))), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) fs.basis.col(static_cast<Eigen::Index>(c)) = cols[c];
  return fs;
}

/// max(|g x - x|) over the generators of D~_h.
inline double symmetry_residual(const Configuration& x, int h) {
  const int n = x.ring_size();
  const Configuration a = apply_group(GroupElement::zeta_power(n / h), x);
  const Configuration b = apply_group(GroupElement::kappa(), x);
  return std::max((a.coords - x.coords).norm(), (b.coords - x.coords).norm());
}

/// One regular h-gon {r e^{i phi} e^{2 pi i k/h}} or one reflection-paired
/// 2h-gon {r e^{+-i phi} e^{2 pi i k/h}}. For h-gons r is signed and phi is
/// 0 or pi/h; for 2h-gons r > 0 and phi in (0, pi/h).
struct PolygonComponent {
  enum class Kind { h_gon, two_h_gon };
  Kind kind = Kind::h_gon;
  int representative = 0;
  double r = 0.0;
  double phi = 0.0;
};

struct Classification {
  int n = 0;
  int h = 0;
  bool has_center = true;
  cplx center{0.0, 0.0};
  double symmetry_residual = 0.0;
  std::vector<PolygonComponent> components;
  bool center_ok = true;
  bool parity_ok = true;

  int count(PolygonComponent::Kind kind) const {
    return static_cast<int>(std::count_if(components.begin(), components.end(),
                                          [kind](const PolygonComponent& c) { return c.kind == kind; }));
  }
};

/// Decompose a D~_h-symmetric configuration into h-gons and 2h-gons.
/// Orbit representatives are the ring members j in [0, n/(2h)] (j = 0 is member n).
inline Classification classify_configuration(const Configuration& x, int h, double tol = kSymmetryTol) {
  const int n = x.ring_size();
  if (h < 1 || n % h != 0) throw InvalidDivisor(std::to_string(h) + " does not divide " + std::to_string(n));
  Classification c;
  c.n = n;
  c.h = h;
  c.has_center = x.has_center;
  c.symmetry_residual = symmetry_residual(x, h);
  if (c.symmetry_residual > tol) {
    throw NotSymmetric("configuration misses D~" + std::to_string(h) + " symmetry by " +
                       std::to_string(c.symmetry_residual));
  }
  if (x.has_center) {
    c.center = x.point(0);
    c.center_ok = h == 1 ? std::abs(c.center.imag()) <= tol : std::abs(c.center) <= tol;
  }
  const double wedge = 2.0 * std::numbers::pi / h;
  const int m = n / h;
  using Kind = PolygonComponent::Kind;
  for (int j = 0; 2 * j <= m; ++j) {
    const cplx z = x.ring(j);
    PolygonComponent pc;
    pc.representative = j == 0 ? n : j;
    if (j == 0) {
      pc.kind = Kind::h_gon;
      pc.r = z.real();
      pc.phi = 0.0;
    } else if (2 * j == m) {
      pc.kind = Kind::h_gon;
      pc.phi = std::numbers::pi / h;
      pc.r = (z * std::polar(1.0, -pc.phi)).real();
    } else {
      double t = std::fmod(std::arg(z), wedge);
      if (t < 0.0) t += wedge;
      pc.phi = std::min(t, wedge - t);
      pc.r = std::abs(z);
      pc.kind = std::abs(std::sin(h * pc.phi)) < tol ? Kind::h_gon : Kind::two_h_gon;
    }
    c.components.push_back(pc);
  }
  const int expected_h = m % 2 == 1 ? 1 : 2;
  const int expected_2h = m % 2 == 1 ? (m - 1) / 2 : (m - 2) / 2;
  c.parity_ok = c.count(Kind::h_gon) == expected_h && c.count(Kind::two_h_gon) == expected_2h;
  for (const auto& pc : c.components) {
    if (pc.kind == Kind::two_h_gon && !(pc.phi > tol && pc.phi < std::numbers::pi / h - tol)) c.parity_ok = false;
  }
  return c;
}

} // namespace ringbif
