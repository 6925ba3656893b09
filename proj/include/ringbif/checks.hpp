#pragma once

// Self-check suite behind `ringbif check`: block structure, Hessian oracle,
// closed forms and sign/degree consistency over a parameter grid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ringbif/bifurcation.hpp"
#include "ringbif/continuation.hpp"
#include "ringbif/potentials.hpp"
#include "ringbif/symmetry.hpp"

namespace ringbif {

struct CheckGrid {
  std::vector<int> ns;
  std::vector<double> alphas{1.0, 2.0, 2.5};
  std::vector<double> mus{-2.0, -0.5, 0.5, 1.0};
  /// Added to entry (0, 0) of every formula block; nonzero values must make
  /// the formula check fail (mutation sanity).
  double block_perturbation = 0.0;

  static CheckGrid standard() {
    CheckGrid g;
    for (int n = 2; n <= 16; ++n) g.ns.push_back(n);
    return g;
  }
};

struct CheckResult {
  std::string name;
  bool passed = true;
  int cases = 0;
  double worst = 0.0;
  double threshold = 0.0;
  std::string detail;
};

namespace detail {

inline std::vector<SystemSpec> check_specs(const CheckGrid& g, int n, double mu) {
  std::vector<SystemSpec> out;
  for (double a : g.alphas) out.push_back(SystemSpec::celestial(a, n, mu));
  if (n >= 3) {
    out.push_back(SystemSpec::dnls(DnlsPotential::cubic(), n, mu));
    out.push_back(SystemSpec::dnls(DnlsPotential::saturable(), n, mu));
  }
  return out;
}

/// Tracks the worst value of a "must stay below threshold" quantity.
struct Tally {
  CheckResult r;
  Tally(std::string name, double threshold) {
    r.name = std::move(name);
    r.threshold = threshold;
  }
  void add(double value, const std::string& where) {
    ++r.cases;
    if (!(value <= r.threshold)) {
      if (r.passed) r.detail = where;
      r.passed = false;
    }
    if (!(value <= r.worst)) r.worst = value;
  }
  void fail(const std::string& where) {
    ++r.cases;
    if (r.passed) r.detail = where;
    r.passed = false;
  }
};

inline std::string label(const SystemSpec& s) {
  return s.family_name() + (s.is_celestial() ? " alpha=" + std::to_string(s.alpha()) : std::string()) +
         " n=" + std::to_string(s.n) + " mu=" + std::to_string(s.mu);
}

} // namespace detail

/// Distance from mu to the nearest parameter value where n_h may change sign.
inline double distance_to_sign_change(const SystemSpec& spec, int h, double mu) {
  double d = std::numeric_limits<double>::infinity();
  for (double c : sign_change_candidates(spec, h)) d = std::min(d, std::abs(c - mu));
  return d;
}

inline CheckResult check_block_diagonal(const CheckGrid& g) {
  detail::Tally t("block_diagonalization", 1e-10);
  for (int n : g.ns) {
    for (double mu : g.mus) {
      for (const auto& s : detail::check_specs(g, n, mu)) {
        const Eigen::MatrixXd A = hessian(s, polygon_points(s));
        t.add(off_block_residual(A, build_P(n, s.has_center())), detail::label(s));
      }
    }
  }
  return t.r;
}

inline CheckResult check_block_formulas(const CheckGrid& g) {
  detail::Tally t("block_formulas", 1e-10);
  for (int n : g.ns) {
    for (double mu : g.mus) {
      for (const auto& s : detail::check_specs(g, n, mu)) {
        const BlockSpectrum ex = extract_blocks(hessian(s, polygon_points(s)), n, s.has_center());
        for (const auto& b : ex.blocks) {
          Eigen::MatrixXcd f = block_formula(s, b.k);
          f(0, 0) += g.block_perturbation;
          t.add((f - b.B).norm(), detail::label(s) + " k=" + std::to_string(b.k));
        }
      }
    }
  }
  return t.r;
}

inline CheckResult check_hessian_oracle(const CheckGrid& g) {
  detail::Tally t("hessian_fd", 1e-6);
  for (int n : g.ns) {
    for (double mu : g.mus) {
      for (const auto& s : detail::check_specs(g, n, mu)) {
        const Configuration x = polygon_points(s);
        const Eigen::MatrixXd A = hessian(s, x);
        t.add((A - hessian_fd(s, x)).norm() / std::max(1.0, A.norm()), detail::label(s));
      }
    }
  }
  return t.r;
}

inline CheckResult check_vortex_closed_forms(const CheckGrid& g) {
  detail::Tally t("vortex_closed_forms", 1e-12);
  for (int n : g.ns) {
    if (n < 3) continue;
    for (int k = 1; k < n; ++k) {
      t.add(std::abs(s_sum(1.0, n, k) - 0.5 * k * (n - k)), "s_k n=" + std::to_string(n) + " k=" + std::to_string(k));
    }
    for (int k = 1; 2 * k <= n; ++k) {
      const double want = k == 1 ? 0.25 * (n - 1) * (n - 1) : 0.25 * (-k * k + n * k - 2 * n + 2);
      t.add(std::abs(celestial_mode_root(1.0, n, k).mu - want), "mu_k n=" + std::to_string(n) + " k=" + std::to_string(k));
    }
  }
  return t.r;
}

inline CheckResult check_two_body(const CheckGrid& g) {
  detail::Tally t("two_body_mu1", 1e-12);
  if (std::find(g.ns.begin(), g.ns.end(), 2) == g.ns.end()) return t.r;
  const std::pair<double, double> cases[] = {{1.0, -5.0 / 4.0}, {2.0, -17.0 / 12.0}};
  for (const auto& [alpha, want] : cases) {
    const double mu1 = two_body_mu1(alpha);
    t.add(std::abs(mu1 - want), "alpha=" + std::to_string(alpha));
    t.add(std::abs(two_body_restricted_det(alpha, mu1)), "restricted det alpha=" + std::to_string(alpha));
  }
  return t.r;
}

inline CheckResult check_dnls_delta2(const CheckGrid& g) {
  detail::Tally t("dnls_delta2", 1e-14);
  for (int n : g.ns) {
    if (n >= 5) t.add(std::abs(dnls_coeffs(n, 2).delta_k), "n=" + std::to_string(n));
  }
  return t.r;
}

/// |eta_h| = 2 at every simple point; eta_1(-s1) = 0 for celestial rings.
inline CheckResult check_degree_jumps(const CheckGrid& g) {
  detail::Tally t("degree_jumps", 0.0);
  for (int n : g.ns) {
    for (const auto& base : detail::check_specs(g, n, 0.0)) {
      for (const auto& p : bif_points(base)) {
        if (!p.simple) continue;
        const std::string where = detail::label(base.with_mu(p.mu)) + " k=" + std::to_string(p.k);
        if (std::abs(p.eta) != 2) t.fail(where + " eta=" + std::to_string(p.eta));
        else t.add(0.0, where);
      }
      if (base.is_celestial() && n >= 3) {
        const double s1 = s_sum(base.alpha(), n, 1);
        const int e = eta(base, 1, -s1, isolating_radius(base, 1, -s1));
        if (e != 0) t.fail(detail::label(base) + " eta_1(-s1)=" + std::to_string(e));
        else t.add(0.0, detail::label(base));
      }
    }
  }
  return t.r;
}

/// det of the FD reduced Jacobian on the polygon has the sign n_h.
inline CheckResult check_jacobian_sign(const CheckGrid& g) {
  detail::Tally t("jacobian_sign", 0.0);
  for (int n : g.ns) {
    for (double mu : g.mus) {
      for (const auto& s : detail::check_specs(g, n, mu)) {
        for (int h = 1; h <= n; ++h) {
          if (n % h != 0) continue;
          if (distance_to_sign_change(s, h, mu) < 1e-3) continue;
          const ReducedProblem rp(s, h);
          const double det = rp.jacobian_fd(Eigen::VectorXd::Zero(rp.dim()), mu).determinant();
          const int want = n_index(s, h, mu);
          const std::string where = detail::label(s) + " h=" + std::to_string(h);
          if ((det > 0 ? 1 : -1) != want) t.fail(where);
          else t.add(0.0, where);
        }
      }
    }
  }
  return t.r;
}

inline std::vector<CheckResult> run_checks(const CheckGrid& g) {
  using Fn = std::function<CheckResult(const CheckGrid&)>;
  const std::pair<const char*, Fn> all[] = {
      {"block_diagonalization", check_block_diagonal}, {"block_formulas", check_block_formulas},
      {"hessian_fd", check_hessian_oracle},             {"vortex_closed_forms", check_vortex_closed_forms},
      {"two_body_mu1", check_two_body},                 {"dnls_delta2", check_dnls_delta2},
      {"degree_jumps", check_degree_jumps},             {"jacobian_sign", check_jacobian_sign},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : all) {
    try {
      out.push_back(fn(g));
    } catch (const std::exception& e) {
      CheckResult r;
      r.name = name;
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
      out.push_back(r);
    }
  }
  return out;
}

} // namespace ringbif
