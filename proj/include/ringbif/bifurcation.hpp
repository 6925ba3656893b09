#pragma once

// Sign indices of the Hessian blocks, the orientation n_h of the reduced
// Jacobian, degree jumps eta_h and the bifurcation values of every family.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "ringbif/errors.hpp"
#include "ringbif/sums.hpp"
#include "ringbif/symmetry.hpp"
#include "ringbif/system.hpp"

namespace ringbif {

/// Distance (relative to max(1, |root|)) below which a sign index is reported as zero.
inline constexpr double kRootTol = 1e-12;

enum class Sign : int { minus = -1, zero = 0, plus = 1 };

inline int to_int(Sign s) { return static_cast<int>(s); }

inline Sign sign_of(double v) { return v > 0.0 ? Sign::plus : (v < 0.0 ? Sign::minus : Sign::zero); }

inline std::string to_string(Sign s) {
  switch (s) {
  case Sign::minus: return "minus";
  case Sign::zero: return "zero";
  case Sign::plus: return "plus";
  }
  return "unknown";
}

struct SignIndex {
  int k = 0;
  Sign sigma = Sign::zero;
};

inline void require_sign_mode(int n, int k) {
  if (!(k == n || (k >= 1 && 2 * k <= n))) {
    throw DomainError("sign index defined for 1 <= k <= n/2 or k = n, got k=" + std::to_string(k));
  }
}

// ---------------------------------------------------------------- celestial

/// det B_k = a_k + b_k mu for 2 <= k <= n/2; for k = 1 the determinant has
/// the sign of b_1 mu (mu + s_1)(mu - mu_1) with mu_1 = -a_1 / b_1.
struct ModeRoot {
  double a = 0.0;
  double b = 0.0;
  double mu = 0.0;
};

inline ModeRoot celestial_mode_root(double alpha, int n, int k) {
  if (n < 3) throw DomainError("celestial_mode_root needs n >= 3; n = 2 has its own restricted block");
  if (k < 1 || 2 * k > n) throw DomainError("celestial mode root needs 1 <= k <= n/2");
  const double s1 = s_sum(alpha, n, 1);
  const CelestialCoeffs c = celestial_coeffs(alpha, n, k);
  ModeRoot r;
  if (k == 1) {
    r.a = (s1 + 2.0 * c.alpha_k) * (2.0 * s1 + n * alpha - n);
    r.b = (alpha + 1.0) * (2.0 * s1 + 2.0 * c.alpha_k - n);
    if (r.b == 0.0) throw DegenerateMode("b_1 vanishes; mu_1 is undefined");
  } else {
    const double d = s1 + c.alpha_k;
    r.a = d * d - c.gamma_k * c.gamma_k - c.beta_k * c.beta_k;
    r.b = (alpha + 1.0) * (d + c.beta_k);
    if (!(r.b > 0.0)) {
      throw DomainError("b_k is not positive for alpha=" + std::to_string(alpha) + ", n=" + std::to_string(n) +
                        ", k=" + std::to_string(k));
    }
  }
  r.mu = -r.a / r.b;
  return r;
}

/// Bifurcating value of the n = 2 celestial problem: -(2 alpha + s_1)/(alpha + 1).
inline double two_body_mu1(double alpha) { return -(2.0 * alpha + s_sum(alpha, 2, 1)) / (alpha + 1.0); }

/// Determinant of the n = 2 block B_1 restricted to its (kappa, kappa)-fixed part.
inline double two_body_restricted_det(double alpha, double mu) {
  const double s1 = s_sum(alpha, 2, 1);
  return mu * (mu + s1) * (2.0 * alpha + mu + s1 + alpha * mu);
}

/// Parameter values where sigma_k vanishes (celestial).
inline std::vector<double> celestial_sign_roots(const SystemSpec& spec, int k) {
  const int n = spec.n;
  const double alpha = spec.alpha();
  const double s1 = s_sum(alpha, n, 1);
  if (k == n) return {-s1};
  if (n == 2) return {0.0, -s1, two_body_mu1(alpha)};
  if (k == 1) return {0.0, -s1, celestial_mode_root(alpha, n, 1).mu};
  return {celestial_mode_root(alpha, n, k).mu};
}

// --------------------------------------------------------------------- dNLS

/// psi(u) = u h'(u); mode k bifurcates where psi(mu^2) = delta_k.
inline double dnls_psi(const DnlsPotential& pot, double u) { return u * pot.dh(u); }

/// Quantity whose sign is sigma_k for the dNLS ring, as a function of u = mu^2:
/// 2 psi (k = n), 2 (psi - delta_{n/2}) (k = n/2), and
/// det B_k = alpha_k^2 - gamma_k^2 - 2 alpha_k psi = 2 alpha_k (delta_k - psi) otherwise.
/// The factored form keeps touching roots from splitting under rounding.
inline double dnls_sign_function(const DnlsPotential& pot, int n, int k, double u) {
  const double psi = dnls_psi(pot, u);
  if (k == n) return 2.0 * psi;
  const double a = dnls_alpha(n, k);
  if (2 * k == n) return 2.0 * psi - a;
  if (a == 0.0) {
    const double g = dnls_gamma(n, k);
    return -g * g;
  }
  return 2.0 * a * (dnls_coeffs(n, k).delta_k - psi);
}

struct ScalarRoot {
  double x = 0.0;
  bool degenerate = false;
};

/// All roots of g on [lo, hi]: sign changes on a geometric grid refined by
/// bisection to 1e-12 (relative), plus touching (double) roots detected as
/// local minima of |g| that reach `touch_tol`.
inline std::vector<ScalarRoot> scan_roots(const std::function<double(double)>& g, double lo, double hi,
                                          int samples = 4000, double touch_tol = 1e-10) {
  std::vector<double> xs(static_cast<std::size_t>(samples));
  std::vector<double> gs(xs.size());
  const double ratio = std::pow(hi / lo, 1.0 / (samples - 1));
  for (int i = 0; i < samples; ++i) {
    xs[static_cast<std::size_t>(i)] = i == samples - 1 ? hi : lo * std::pow(ratio, i);
    gs[static_cast<std::size_t>(i)] = g(xs[static_cast<std::size_t>(i)]);
  }
  std::vector<ScalarRoot> roots;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::max(1.0, std::abs(a)); };
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double ga = gs[i], gb = gs[i + 1];
    if (ga == 0.0) {
      if (roots.empty() || roots.back().x != xs[i]) roots.push_back({xs[i], false});
      continue;
    }
    if (ga * gb < 0.0) {
      const auto [a, b] = boost::math::tools::bisect(g, xs[i], xs[i + 1], tol);
      roots.push_back({0.5 * (a + b), false});
    } else if (i > 0 && gb != 0.0 && std::abs(ga) < std::abs(gs[i - 1]) && std::abs(ga) <= std::abs(gb) &&
               gs[i - 1] * ga > 0.0 && ga * gb > 0.0) {
      auto absg = [&g](double x) { return std::abs(g(x)); };
      const auto [xm, fm] = boost::math::tools::brent_find_minima(absg, xs[i - 1], xs[i + 1], 52);
      if (fm <= touch_tol) roots.push_back({xm, true});
    }
  }
  if (gs.back() == 0.0) roots.push_back({xs.back(), false});
  return roots;
}

inline constexpr double kDnlsUMin = 1e-10;
inline constexpr double kDnlsUMax = 1e4;

struct DnlsRoot {
  double mu = 0.0;
  bool degenerate = false;
  bool closed_form = false;
};

/// Positive amplitudes mu at which sigma_k of the dNLS ring vanishes.
inline std::vector<DnlsRoot> dnls_sign_roots(const SystemSpec& spec, int k, double u_max = kDnlsUMax) {
  const int n = spec.n;
  const DnlsPotential& pot = spec.potential();
  const double a = dnls_alpha(n, k);
  if (k != n && pot.kind == PotentialKind::cubic) {
    // psi(u) = u, so the single root is u = delta_k when it is positive.
    if (a == 0.0 && 2 * k != n) return {};
    const double delta = 2 * k == n ? a / 2.0 : dnls_coeffs(n, k).delta_k;
    if (delta > 0.0 && delta <= u_max) return {{std::sqrt(delta), false, true}};
    return {};
  }
  if (k == n && pot.kind != PotentialKind::custom) return {};  // psi vanishes only at u = 0
  auto g = [&](double u) { return dnls_sign_function(pot, n, k, u); };
  std::vector<DnlsRoot> out;
  for (const auto& r : scan_roots(g, kDnlsUMin, u_max)) out.push_back({std::sqrt(r.x), r.degenerate, false});
  return out;
}

// ------------------------------------------------------------ sign indices

/// Closed-form quantity whose sign is sigma_k at mu.
inline double sign_function(const SystemSpec& spec, int k, double mu) {
  const int n = spec.n;
  require_sign_mode(n, k);
  if (!spec.is_celestial()) return dnls_sign_function(spec.potential(), n, k, mu * mu);
  const double alpha = spec.alpha();
  const double s1 = s_sum(alpha, n, 1);
  if (k == n) return mu + s1;
  if (n == 2) return two_body_restricted_det(alpha, mu);
  const ModeRoot r = celestial_mode_root(alpha, n, k);
  if (k == 1) return r.b * mu * (mu + s1) * (mu - r.mu);
  return r.a + r.b * mu;
}

inline SignIndex sigma(const SystemSpec& spec, int k, double mu) {
  require_sign_mode(spec.n, k);
  SignIndex out{k, Sign::zero};
  if (spec.is_celestial()) {
    for (double root : celestial_sign_roots(spec, k)) {
      if (std::abs(mu - root) <= kRootTol * std::max(1.0, std::abs(root))) return out;
    }
    out.sigma = sign_of(sign_function(spec, k, mu));
    return out;
  }
  const double v = sign_function(spec, k, mu);
  const double a = dnls_alpha(spec.n, k), g = dnls_gamma(spec.n, k);
  out.sigma = std::abs(v) <= kRootTol * (1.0 + a * a + g * g) ? Sign::zero : sign_of(v);
  return out;
}

/// Modes whose signs enter n_h: [1, n/2] cap hN, then n.
inline std::vector<int> sign_modes(int n, int h) {
  if (h < 1 || n % h != 0) throw InvalidDivisor(std::to_string(h) + " does not divide " + std::to_string(n));
  return fixed_modes(n, h);
}

/// n_h(mu) = sigma_n prod_{j in [1,n/2] cap hN} sigma_j.
inline int n_index(const SystemSpec& spec, int h, double mu) {
  int prod = 1;
  for (int k : sign_modes(spec.n, h)) prod *= to_int(sigma(spec, k, mu).sigma);
  return prod;
}

/// Every parameter value where some sigma_j entering n_h vanishes, sorted and
/// merged (dNLS values are mirrored to negative amplitudes, mu = 0 included).
inline std::vector<double> sign_change_candidates(const SystemSpec& spec, int h) {
  std::vector<double> c;
  for (int k : sign_modes(spec.n, h)) {
    if (spec.is_celestial()) {
      for (double r : celestial_sign_roots(spec, k)) c.push_back(r);
    } else {
      for (const auto& r : dnls_sign_roots(spec, k)) {
        c.push_back(r.mu);
        c.push_back(-r.mu);
      }
    }
  }
  if (!spec.is_celestial()) c.push_back(0.0);
  std::sort(c.begin(), c.end());
  std::vector<double> merged;
  for (double v : c) {
    if (merged.empty() || std::abs(v - merged.back()) > kRootTol * std::max(1.0, std::abs(v))) merged.push_back(v);
  }
  return merged;
}

/// eta_h(mu0) = n_h(mu0 - rho) - n_h(mu0 + rho).
inline int eta(const SystemSpec& spec, int h, double mu0, double rho) {
  if (!(rho > 0.0)) throw DomainError("eta window radius must be positive");
  int inside = 0;
  for (double c : sign_change_candidates(spec, h)) {
    if (c > mu0 - rho && c < mu0 + rho) ++inside;
  }
  if (inside > 1) {
    throw AmbiguousWindow("window of radius " + std::to_string(rho) + " around " + std::to_string(mu0) + " holds " +
                          std::to_string(inside) + " candidate crossings");
  }
  return n_index(spec, h, mu0 - rho) - n_index(spec, h, mu0 + rho);
}

/// Largest window radius (capped at `cap`) around mu0 that isolates mu0 from
/// every other candidate crossing of n_h.
inline double isolating_radius(const SystemSpec& spec, int h, double mu0, double cap = 1e-4) {
  double rho = cap;
  for (double c : sign_change_candidates(spec, h)) {
    const double d = std::abs(c - mu0);
    if (d > kRootTol * std::max(1.0, std::abs(mu0))) rho = std::min(rho, 0.45 * d);
  }
  return rho;
}

// --------------------------------------------------------- reduced blocks

/// Complex directions spanning the (kappa, kappa)-fixed real coordinates of
/// mode k: z = R conj(z) gives (e1, i e2) generically, (e1, e2, i e3) for the
/// celestial 3x3 mode, e1 for k in {n, n/2}, and (v1, w1) for n = 2.
inline Eigen::MatrixXcd fixed_directions(int n, int k, bool has_center) {
  const cplx i(0.0, 1.0);
  const int d = mode_dim(n, k, has_center);
  Eigen::MatrixXcd S;
  if (has_center && n == 2 && k == 1) {
    S = Eigen::MatrixXcd::Zero(4, 2);
    S(0, 0) = 1.0;
    S(2, 1) = 1.0;
  } else if (k == n || 2 * k == n) {
    S = Eigen::MatrixXcd::Zero(d, 1);
    S(0, 0) = 1.0;
  } else {
    S = Eigen::MatrixXcd::Identity(d, d);
    S(d - 1, d - 1) = i;
  }
  return S;
}

/// Real symmetric restriction D_k = S* B_k S of a block to its fixed part.
inline Eigen::MatrixXd reduced_block(const Eigen::MatrixXcd& B, int n, int k, bool has_center) {
  const Eigen::MatrixXcd S = fixed_directions(n, k, has_center);
  return (S.adjoint() * B * S).real();
}

// ------------------------------------------------------ bifurcation table

enum class Provenance { closed_form, root_solve };

inline std::string to_string(Provenance p) { return p == Provenance::closed_form ? "closed_form" : "root_solve"; }

struct BifurcationPoint {
  int k = 0;
  int h = 0;
  double mu = 0.0;
  int eta = 0;
  Provenance provenance = Provenance::closed_form;
  bool physical = true;
  bool trivial = false;
  bool degenerate = false;
  /// Exactly one sign index of n_h vanishes here, at a simple root.
  bool simple = false;
  std::string note;
};

namespace detail {

inline bool mu_equal(double a, double b) { return std::abs(a - b) <= kRootTol * std::max(1.0, std::abs(a)); }

/// Number of modes in the n_h index set whose sign vanishes at mu.
inline int vanishing_modes(const SystemSpec& spec, int h, double mu) {
  int count = 0;
  for (int k : sign_modes(spec.n, h)) {
    if (spec.is_celestial()) {
      for (double r : celestial_sign_roots(spec, k)) {
        if (mu_equal(r, mu)) {
          ++count;
          break;
        }
      }
    } else if (sigma(spec, k, mu).sigma == Sign::zero) {
      ++count;
    }
  }
  return count;
}

inline void finish_point(const SystemSpec& spec, BifurcationPoint& p) {
  p.eta = eta(spec, p.h, p.mu, isolating_radius(spec, p.h, p.mu));
  p.simple = !p.degenerate && vanishing_modes(spec, p.h, p.mu) == 1;
  if (p.degenerate) p.eta = 0;
}

} // namespace detail

/// All bifurcation values: celestial k = 1..floor(n/2) plus the trivial
/// values mu = 0 and mu = -s_1; dNLS positive amplitudes with mu^2 h'(mu^2) = delta_k.
inline std::vector<BifurcationPoint> bif_points(const SystemSpec& spec) {
  spec.validate();
  const int n = spec.n;
  std::vector<BifurcationPoint> out;
  if (spec.is_celestial()) {
    const double alpha = spec.alpha();
    const double s1 = s_sum(alpha, n, 1);
    const bool masses = alpha != 1.0;
    auto push = [&](int k, double mu, bool trivial, std::string note) {
      BifurcationPoint p;
      p.k = k;
      p.h = std::gcd(k, n);
      p.mu = mu;
      p.provenance = Provenance::closed_form;
      p.trivial = trivial;
      p.physical = !trivial && (!masses || mu >= 0.0);
      p.note = std::move(note);
      detail::finish_point(spec, p);
      out.push_back(p);
    };
    push(1, 0.0, true, "central mass zero; kernel made of translations of the polygon");
    push(1, -s1, true, "omega = 0; sigma_1 and sigma_n change together");
    push(n, -s1, true, "omega = 0; kernel made of homotheties of the polygon");
    push(1, n == 2 ? two_body_mu1(alpha) : celestial_mode_root(alpha, n, 1).mu, false, "");
    for (int k = 2; 2 * k <= n; ++k) push(k, celestial_mode_root(alpha, n, k).mu, false, "");
    for (auto& p : out) {
      if (!p.trivial && !p.simple && p.note.empty()) p.note = "coincides with another crossing of the same index";
      if (!p.trivial && masses && p.mu < 0.0 && p.note.empty()) p.note = "negative central mass";
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.mu < b.mu; });
    return out;
  }
  for (int k = 1; 2 * k <= n; ++k) {
    for (const auto& r : dnls_sign_roots(spec, k)) {
      BifurcationPoint p;
      p.k = k;
      p.h = std::gcd(k, n);
      p.mu = r.mu;
      p.provenance = r.closed_form ? Provenance::closed_form : Provenance::root_solve;
      p.degenerate = r.degenerate;
      p.physical = true;
      if (r.degenerate) p.note = "double root; no sign change";
      detail::finish_point(spec, p);
      out.push_back(p);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.mu < b.mu; });
  return out;
}

/// One row of the large-n table for the gravitational problem.
struct AsymptoticRow {
  int n = 0;
  double s1 = 0.0;
  double mu_k = 0.0;
  double ratio = 0.0;
  double limit = 0.0;
  double gap = 0.0;
};

/// mu_k / s_1 for the body problem (alpha = 2) against the large-n limits
/// -1/2 for k = 1 and 2k^2 - 5 for k >= 2.
inline std::vector<AsymptoticRow> body_asymptotics_check(int k, const std::vector<int>& n_list) {
  if (k < 1) throw DomainError("k must be positive");
  std::vector<AsymptoticRow> rows;
  for (int n : n_list) {
    if (2 * k > n) throw DomainError("n too small for mode " + std::to_string(k));
    AsymptoticRow r;
    r.n = n;
    r.s1 = s_sum(2.0, n, 1);
    r.mu_k = celestial_mode_root(2.0, n, k).mu;
    r.ratio = r.mu_k / r.s1;
    r.limit = k == 1 ? -0.5 : 2.0 * k * k - 5.0;
    r.gap = std::abs(r.ratio - r.limit);
    rows.push_back(r);
  }
  return rows;
}

} // namespace ringbif
