#pragma once

// Reduced gradient on the fixed-point subspace of D~_h, branch switching at a
// bifurcation point and pseudo-arclength continuation of the bifurcating branch.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringbif/bifurcation.hpp"
#include "ringbif/errors.hpp"
#include "ringbif/potentials.hpp"
#include "ringbif/symmetry.hpp"
#include "ringbif/system.hpp"

namespace ringbif {

/// f_h(y, mu) = B^T grad V(x0 + B y) with B an orthonormal basis of W^{D~_h}
/// and x0 the polygon. Jacobians use the exact Hessian.
class ReducedProblem {
public:
  ReducedProblem(SystemSpec spec, int h)
      : spec_(std::move(spec)), h_(h), fs_(fixed_subspace_basis(spec_.n, h, spec_.has_center())),
        x0_(polygon_points(spec_)) {}

  const SystemSpec& spec() const { return spec_; }
  int h() const { return h_; }
  int dim() const { return fs_.dim(); }
  const FixedSubspace& subspace() const { return fs_; }
  const Configuration& polygon() const { return x0_; }

  Configuration reconstruct(const Eigen::VectorXd& y) const {
    return {x0_.coords + fs_.basis * y, x0_.has_center};
  }

  Eigen::VectorXd map(const Eigen::VectorXd& y, double mu) const {
    return fs_.basis.transpose() * gradient(spec_.with_mu(mu), reconstruct(y));
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& y, double mu) const {
    return fs_.basis.transpose() * hessian(spec_.with_mu(mu), reconstruct(y)) * fs_.basis;
  }

  Eigen::VectorXd mu_derivative(const Eigen::VectorXd& y, double mu) const {
    return fs_.basis.transpose() * gradient_mu_derivative(spec_.with_mu(mu), reconstruct(y));
  }

  /// Central-difference Jacobian of map(), independent of the analytic Hessian.
  Eigen::MatrixXd jacobian_fd(const Eigen::VectorXd& y, double mu, double step = 1e-6) const {
    Eigen::MatrixXd J(dim(), dim());
    for (int c = 0; c < dim(); ++c) {
      Eigen::VectorXd yp = y, ym = y;
      yp(c) += step;
      ym(c) -= step;
      J.col(c) = (map(yp, mu) - map(ym, mu)) / (2.0 * step);
    }
    return J;
  }

private:
  SystemSpec spec_;
  int h_;
  FixedSubspace fs_;
  Configuration x0_;
};

inline Eigen::VectorXd reduced_map(const SystemSpec& spec, int h, const Eigen::VectorXd& y, double mu) {
  return ReducedProblem(spec, h).map(y, mu);
}

struct BranchPoint {
  Eigen::VectorXd y;
  double mu = 0.0;
  Configuration x;
  double residual = 0.0;
  double min_singular = 0.0;
};

enum class Termination { collision, mu_bound, norm_bound, returned_to_trivial, step_limit };

inline std::string to_string(Termination t) {
  switch (t) {
  case Termination::collision: return "collision";
  case Termination::mu_bound: return "mu_bound";
  case Termination::norm_bound: return "norm_bound";
  case Termination::returned_to_trivial: return "returned_to_trivial";
  case Termination::step_limit: return "step_limit";
  }
  return "unknown";
}

struct ContinuationOptions {
  double ds = 0.02;
  double ds_min = 1e-6;
  double ds_max = 0.1;
  double newton_tol = 1e-10;
  int max_newton_iter = 12;
  int max_steps = 200;
  double mu_bound = 1e3;
  double norm_bound = 1e2;
  double collision_tol = 1e-6;
  /// Branch-switch radius; also sets the returned-to-trivial detection scale.
  double eps = 1e-2;
};

struct Branch {
  std::vector<BranchPoint> points;
  int h = 0;
  BifurcationPoint origin;
  Termination termination = Termination::step_limit;
  /// Continuation steps accepted after the branch-switch point.
  int steps = 0;
  /// For returned_to_trivial: singular point of the trivial branch where the
  /// branch lands, and the table entry it matches (within 1e-4) if any.
  std::optional<double> mu_end;
  std::optional<BifurcationPoint> landing;
  bool max_symmetry_verified = false;
  std::string diagnostics;
};

namespace detail {

inline double min_singular_value(const Eigen::MatrixXd& J) {
  if (J.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  return svd.singularValues().minCoeff();
}

inline BranchPoint make_point(const ReducedProblem& rp, const Eigen::VectorXd& y, double mu) {
  BranchPoint p;
  p.y = y;
  p.mu = mu;
  p.x = rp.reconstruct(y);
  p.residual = gradient(rp.spec().with_mu(mu), p.x).norm();
  p.min_singular = min_singular_value(rp.jacobian(y, mu));
  return p;
}

/// Newton on [f(y, mu); c(y, mu)] with c a scalar constraint and gradient dc.
/// Returns false on divergence, a non-finite iterate or a collision.
template <class Constraint, class ConstraintGrad>
bool augmented_newton(const ReducedProblem& rp, Eigen::VectorXd& y, double& mu, Constraint c, ConstraintGrad dc,
                      double tol, int max_iter) {
  const int d = rp.dim();
  try {
    for (int it = 0; it <= max_iter; ++it) {
      const Eigen::VectorXd f = rp.map(y, mu);
      const double cv = c(y, mu);
      if (!f.allFinite() || !std::isfinite(cv)) return false;
      if (f.norm() <= 0.1 * tol && std::abs(cv) <= 1e-13) return true;
      if (it == max_iter) return f.norm() <= 0.1 * tol;
      Eigen::MatrixXd M(d + 1, d + 1);
      M.topLeftCorner(d, d) = rp.jacobian(y, mu);
      M.topRightCorner(d, 1) = rp.mu_derivative(y, mu);
      M.bottomRows(1) = dc(y, mu).transpose();
      Eigen::VectorXd rhs(d + 1);
      rhs << f, cv;
      const Eigen::VectorXd delta = M.fullPivLu().solve(rhs);
      if (!delta.allFinite()) return false;
      y -= delta.head(d);
      mu -= delta(d);
      if (delta.norm() > 1e6) return false;
    }
  } catch (const SingularInput&) {
    return false;
  }
  return false;
}

/// Unit null vector of [J, f_mu] oriented along `previous`.
inline Eigen::VectorXd tangent(const ReducedProblem& rp, const Eigen::VectorXd& y, double mu,
                               const Eigen::VectorXd& previous) {
  const int d = rp.dim();
  Eigen::MatrixXd M(d, d + 1);
  M.leftCols(d) = rp.jacobian(y, mu);
  M.col(d) = rp.mu_derivative(y, mu);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  Eigen::VectorXd t = svd.matrixV().col(d);
  if (t.dot(previous) < 0.0) t = -t;
  return t.normalized();
}

} // namespace detail

/// Kernel direction of the reduced Jacobian at (0, mu_k), sign-normalised so
/// that its largest-magnitude component is positive.
inline Eigen::VectorXd kernel_direction(const ReducedProblem& rp, double mu, double rel_tol = 1e-7) {
  const Eigen::MatrixXd J = rp.jacobian(Eigen::VectorXd::Zero(rp.dim()), mu);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  int count = 0, idx = -1;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i)) <= rel_tol * scale) {
      ++count;
      idx = i;
    }
  }
  if (count != 1) {
    throw DegenerateBifurcation("reduced Jacobian kernel has dimension " + std::to_string(count) + " at mu=" +
                                std::to_string(mu));
  }
  Eigen::VectorXd phi = es.eigenvectors().col(idx);
  Eigen::Index imax = 0;
  phi.cwiseAbs().maxCoeff(&imax);
  if (phi(imax) < 0.0) phi = -phi;
  return phi;
}

enum class Side { plus, minus };

inline std::string to_string(Side s) { return s == Side::plus ? "plus" : "minus"; }

/// Corrected point of the bifurcating branch on the sphere |y| = eps around
/// the trivial solution at the bifurcation value.
inline BranchPoint branch_switch(const ReducedProblem& rp, const BifurcationPoint& bp, Side side, double eps,
                                 double newton_tol = 1e-10, int max_iter = 30) {
  if (bp.h != rp.h()) throw DomainError("bifurcation point and reduced problem use different h");
  if (eps == 0.0) return detail::make_point(rp, Eigen::VectorXd::Zero(rp.dim()), bp.mu);
  if (bp.eta == 0 || bp.degenerate) throw DegenerateBifurcation("bifurcation point has eta = 0");
  const Eigen::VectorXd phi = kernel_direction(rp, bp.mu);
  Eigen::VectorXd y = (side == Side::plus ? eps : -eps) * phi;
  double mu = bp.mu;
  auto c = [eps](const Eigen::VectorXd& v, double) { return 0.5 * (v.squaredNorm() - eps * eps); };
  auto dc = [](const Eigen::VectorXd& v, double) {
    Eigen::VectorXd g(v.size() + 1);
    g << v, 0.0;
    return g;
  };
  if (!detail::augmented_newton(rp, y, mu, c, dc, newton_tol, max_iter)) {
    throw NoSwitch("Newton did not converge on the sphere of radius " + std::to_string(eps));
  }
  BranchPoint p = detail::make_point(rp, y, mu);
  if (p.residual > newton_tol) throw NoSwitch("branch-switch residual " + std::to_string(p.residual));
  return p;
}

inline BranchPoint branch_switch(const SystemSpec& spec, const BifurcationPoint& bp, Side side, double eps) {
  return branch_switch(ReducedProblem(spec, bp.h), bp, side, eps);
}

namespace detail {

/// Root of det J(0, mu) nearest to mu_guess, bracketed by an expanding scan.
inline std::optional<double> trivial_singular_point(const ReducedProblem& rp, double mu_guess, double width) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(rp.dim());
  auto det = [&](double m) { return rp.jacobian(zero, m).determinant(); };
  for (double w = width; w <= 64.0 * width; w *= 2.0) {
    const int samples = 64;
    double prev_m = mu_guess - w, prev_d = det(prev_m);
    double best = std::numeric_limits<double>::infinity();
    std::optional<double> root;
    for (int i = 1; i <= samples; ++i) {
      const double m = mu_guess - w + 2.0 * w * i / samples;
      const double dv = det(m);
      if (prev_d == 0.0 || prev_d * dv < 0.0) {
        auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(a)); };
        const auto [a, b] = boost::math::tools::bisect(det, prev_m, m, tol);
        const double r = 0.5 * (a + b);
        if (std::abs(r - mu_guess) < best) {
          best = std::abs(r - mu_guess);
          root = r;
        }
      }
      prev_m = m;
      prev_d = dv;
    }
    if (root) return root;
  }
  return std::nullopt;
}

} // namespace detail

/// Pseudo-arclength continuation in (y, mu) from a converged branch point.
/// `origin_mu` is the bifurcation value the branch leaves from.
inline Branch continue_branch(const ReducedProblem& rp, const BranchPoint& start, const BifurcationPoint& origin,
                              const ContinuationOptions& opts) {
  Branch br;
  br.h = rp.h();
  br.origin = origin;
  br.points.push_back(start);
  const int d = rp.dim();
  if (start.y.norm() == 0.0) {
    br.termination = Termination::returned_to_trivial;
    br.mu_end = start.mu;
    br.diagnostics = "start point is the trivial solution";
    return br;
  }
  Eigen::VectorXd u(d + 1);
  u << start.y, start.mu;
  // Leave the trivial branch: orient the first tangent away from (0, mu_origin).
  Eigen::VectorXd prev_dir(d + 1);
  prev_dir << start.y, start.mu - origin.mu;
  Eigen::VectorXd t = detail::tangent(rp, start.y, start.mu, prev_dir);
  double ds = std::clamp(opts.ds, opts.ds_min, opts.ds_max);
  int successes = 0;
  const double return_radius = 10.0 * opts.eps;
  bool far_from_origin = false;

  while (br.steps < opts.max_steps) {
    Eigen::VectorXd yn = u.head(d) + ds * t.head(d);
    double mun = u(d) + ds * t(d);
    const Eigen::VectorXd u_prev = u, t_prev = t;
    const double step = ds;
    auto c = [&](const Eigen::VectorXd& y, double mu) {
      Eigen::VectorXd w(d + 1);
      w << y, mu;
      return t_prev.dot(w - u_prev) - step;
    };
    auto dc = [&](const Eigen::VectorXd&, double) { return t_prev; };
    const bool ok = detail::augmented_newton(rp, yn, mun, c, dc, opts.newton_tol, opts.max_newton_iter);
    BranchPoint p;
    bool accepted = false;
    if (ok) {
      try {
        p = detail::make_point(rp, yn, mun);
        accepted = p.residual <= opts.newton_tol;
      } catch (const SingularInput&) {
        accepted = false;
      }
    }
    if (!accepted) {
      ds *= 0.5;
      successes = 0;
      if (ds < opts.ds_min) {
        br.termination = Termination::step_limit;
        br.diagnostics = "step size fell below ds_min at mu=" + std::to_string(u(d));
        return br;
      }
      continue;
    }
    if (min_pairwise_distance(p.x) < opts.collision_tol) {
      br.termination = Termination::collision;
      br.diagnostics = "pairwise distance below collision_tol";
      return br;
    }
    br.points.push_back(p);
    ++br.steps;
    u << yn, mun;
    t = detail::tangent(rp, yn, mun, t_prev);
    if (++successes >= 3) {
      ds = std::min(ds * 1.3, opts.ds_max);
      successes = 0;
    }
    if (std::abs(mun) > opts.mu_bound) {
      br.termination = Termination::mu_bound;
      return br;
    }
    if (yn.norm() > opts.norm_bound) {
      br.termination = Termination::norm_bound;
      return br;
    }
    const double dist = std::abs(mun - origin.mu);
    // A return is only claimed after the branch has left the 10 eps ball in y.
    if (yn.norm() >= return_radius) far_from_origin = true;
    if (far_from_origin && yn.norm() < return_radius && dist > return_radius) {
      br.termination = Termination::returned_to_trivial;
      br.mu_end = detail::trivial_singular_point(rp, mun, std::max(return_radius, 4.0 * ds));
      if (br.mu_end) {
        for (const auto& q : bif_points(rp.spec())) {
          if (q.h == rp.h() && std::abs(q.mu - *br.mu_end) <= 1e-4) br.landing = q;
        }
      }
      if (!br.landing) br.diagnostics = "landing value matches no tabulated bifurcation point";
      return br;
    }
  }
  br.termination = Termination::step_limit;
  br.diagnostics = "max_steps reached";
  return br;
}

inline Branch continue_branch(const SystemSpec& spec, const BranchPoint& start, const BifurcationPoint& origin,
                              const ContinuationOptions& opts) {
  return continue_branch(ReducedProblem(spec, origin.h), start, origin, opts);
}

struct VerificationReport {
  double max_residual = 0.0;
  double max_symmetry_dev = 0.0;
  /// Smallest distance of the early points from any strictly larger fixed
  /// subspace (from the trivial solution when h = n).
  double maximality_margin = 0.0;
  bool maximality_pass = false;
  bool classification_pass = false;
  int classified_points = 0;
  std::optional<int> eta_sum;
  std::string first_failure;
};

inline constexpr double kMaximalityThreshold = 1e-4;
inline constexpr int kEarlyPoints = 5;

inline VerificationReport verify_branch(const Branch& branch, const SystemSpec& spec) {
  VerificationReport rep;
  if (branch.points.empty()) {
    rep.first_failure = "empty branch";
    return rep;
  }
  const int n = spec.n;
  const int h = branch.h;
  const Configuration x0 = polygon_points(spec);
  rep.classification_pass = true;
  for (const auto& p : branch.points) {
    rep.max_residual = std::max(rep.max_residual, gradient(spec.with_mu(p.mu), p.x).norm());
    rep.max_symmetry_dev = std::max(rep.max_symmetry_dev, symmetry_residual(p.x, h));
    try {
      const Classification c = classify_configuration(p.x, h, 1e-8);
      if (!c.center_ok || !c.parity_ok) {
        if (rep.classification_pass) rep.first_failure = "classification mismatch at mu=" + std::to_string(p.mu);
        rep.classification_pass = false;
      } else {
        ++rep.classified_points;
      }
    } catch (const NotSymmetric& e) {
      if (rep.classification_pass) rep.first_failure = e.what();
      rep.classification_pass = false;
    }
  }
  std::vector<Eigen::MatrixXd> larger;
  for (int p = 2 * h; p <= n; p += h) {
    if (n % p == 0) larger.push_back(fixed_subspace_basis(n, p, spec.has_center()).projector());
  }
  rep.maximality_margin = std::numeric_limits<double>::infinity();
  const int early = std::min<int>(kEarlyPoints, static_cast<int>(branch.points.size()));
  for (int i = 0; i < early; ++i) {
    const Eigen::VectorXd dx = branch.points[static_cast<std::size_t>(i)].x.coords - x0.coords;
    if (larger.empty()) rep.maximality_margin = std::min(rep.maximality_margin, dx.norm());
    for (const auto& P : larger) rep.maximality_margin = std::min(rep.maximality_margin, (dx - P * dx).norm());
  }
  rep.maximality_pass = rep.maximality_margin > kMaximalityThreshold;
  if (!rep.maximality_pass && rep.first_failure.empty()) rep.first_failure = "branch lies in a larger fixed subspace";
  if (branch.termination == Termination::returned_to_trivial && branch.landing) {
    rep.eta_sum = branch.origin.eta + branch.landing->eta;
  }
  return rep;
}

} // namespace ringbif
