#pragma once

// Problem description (family, ring size, parameter) and planar configurations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "ringbif/errors.hpp"
#include "ringbif/sums.hpp"

namespace ringbif {

using cplx = std::complex<double>;

enum class PotentialKind { cubic, saturable, custom };

inline std::string to_string(PotentialKind kind) {
  switch (kind) {
  case PotentialKind::cubic: return "cubic";
  case PotentialKind::saturable: return "saturable";
  case PotentialKind::custom: return "custom";
  }
  return "unknown";
}

/// On-site nonlinearity of the dNLS ring: h and its derivative, both as
/// functions of |q|^2. Callables must be safe to invoke concurrently.
struct DnlsPotential {
  PotentialKind kind = PotentialKind::cubic;
  std::function<double(double)> h;
  std::function<double(double)> dh;

  static DnlsPotential cubic() {
    return {PotentialKind::cubic, [](double u) { return u; }, [](double) { return 1.0; }};
  }
  static DnlsPotential saturable() {
    return {PotentialKind::saturable, [](double u) { return 1.0 / (1.0 + u); },
            [](double u) { return -1.0 / ((1.0 + u) * (1.0 + u)); }};
  }
  static DnlsPotential custom(std::function<double(double)> h, std::function<double(double)> dh) {
    return {PotentialKind::custom, std::move(h), std::move(dh)};
  }
};

/// Central body plus n unit bodies with attraction phi'(r) = -1/r^alpha.
/// alpha = 1 is the vortex problem, alpha = 2 the gravitational one.
struct Celestial {
  double alpha = 1.0;
};

struct Dnls {
  DnlsPotential potential = DnlsPotential::cubic();
};

/// One member of a family: ring size n and parameter mu (central
/// mass/circulation for celestial systems, amplitude for dNLS).
struct SystemSpec {
  std::variant<Celestial, Dnls> family;
  int n = 3;
  double mu = 0.0;

  static SystemSpec celestial(double alpha, int n, double mu) {
    SystemSpec s{Celestial{alpha}, n, mu};
    s.validate();
    return s;
  }
  static SystemSpec vortex(int n, double mu) { return celestial(1.0, n, mu); }
  static SystemSpec body(int n, double mu) { return celestial(2.0, n, mu); }
  static SystemSpec dnls(DnlsPotential potential, int n, double mu) {
    SystemSpec s{Dnls{std::move(potential)}, n, mu};
    s.validate();
    return s;
  }

  bool is_celestial() const { return std::holds_alternative<Celestial>(family); }
  bool has_center() const { return is_celestial(); }
  double alpha() const { return std::get<Celestial>(family).alpha; }
  const DnlsPotential& potential() const { return std::get<Dnls>(family).potential; }

  /// Number of planar points: n + 1 with the central body, n otherwise.
  int num_points() const { return is_celestial() ? n + 1 : n; }
  int dim() const { return 2 * num_points(); }
  double zeta() const { return 2.0 * std::numbers::pi / n; }

  SystemSpec with_mu(double m) const {
    SystemSpec s = *this;
    s.mu = m;
    return s;
  }

  /// Rotation frequency making the polygon an equilibrium; always recomputed.
  double omega() const {
    if (is_celestial()) return mu + s_sum(alpha(), n, 1);
    const double s = std::sin(zeta() / 2.0);
    return 4.0 * s * s - potential().h(mu * mu);
  }

  void validate() const {
    if (is_celestial()) {
      if (!(alpha() >= 1.0)) throw DomainError("alpha must be >= 1");
      if (n < 2) throw DomainError("celestial ring needs n >= 2");
    } else {
      if (n < 3) throw DomainError("dNLS ring needs n >= 3");
      if (!potential().h || !potential().dh) throw DomainError("dNLS potential needs h and h'");
    }
  }

  std::string family_name() const {
    if (is_celestial()) {
      if (alpha() == 1.0) return "vortex";
      if (alpha() == 2.0) return "body";
      return "alpha";
    }
    return "dnls-" + to_string(potential().kind);
  }
};

/// Planar points stored as a flat vector (x_0, y_0, x_1, y_1, ...).
/// With a central body, point 0 is the centre and point j the j-th ring
/// member; without one, point j-1 is the j-th ring member.
struct Configuration {
  Eigen::VectorXd coords;
  bool has_center = true;

  Configuration() = default;
  Configuration(Eigen::VectorXd c, bool center) : coords(std::move(c)), has_center(center) {}

  static Configuration zeros(int points, bool center) {
    return {Eigen::VectorXd::Zero(2 * points), center};
  }

  int num_points() const { return static_cast<int>(coords.size() / 2); }
  int ring_size() const { return has_center ? num_points() - 1 : num_points(); }

  cplx point(int p) const { return {coords(2 * p), coords(2 * p + 1)}; }
  void set_point(int p, cplx z) {
    coords(2 * p) = z.real();
    coords(2 * p + 1) = z.imag();
  }

  /// Storage index of ring member j (any integer, taken mod n into 1..n).
  int ring_index(int j) const {
    const int n = ring_size();
    const int r = reduce_mode(j - 1, n);
    return has_center ? r + 1 : r;
  }
  cplx ring(int j) const { return point(ring_index(j)); }

  double norm() const { return coords.norm(); }
};

/// Smallest pairwise distance; +inf for a single point.
inline double min_pairwise_distance(const Configuration& x) {
  double best = std::numeric_limits<double>::infinity();
  const int m = x.num_points();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) best = std::min(best, std::abs(x.point(i) - x.point(j)));
  }
  return best;
}

} // namespace ringbif
