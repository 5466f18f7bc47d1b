#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "latticefbm/error.hpp"

namespace latticefbm {

enum class Boundary { periodic, zero_padded };
enum class FamilyKind { generic, stability };

/// Node-wise scalar maps f_i, h_i with derivatives and the bounds used by the
/// estimates. `derivative_envelope`, when present, is the closed form of
/// r -> sup_{||v|| <= r} (||Df(v)|| + ||Dh(v)||).
struct NonlinearityFamily {
  using Scalar = std::function<double(std::size_t, double)>;

  FamilyKind kind = FamilyKind::generic;
  std::string name;
  Scalar f, df, d2f, h, dh, d2h;
  double D_f = 0.0, M_f = 0.0, D_h = 0.0, M_h = 0.0;
  double delta = 1.0;
  std::function<double(double)> derivative_envelope;

  /// f_i(u) = a tanh(u), h_i(u) = b sin(u).
  static NonlinearityFamily generic_default(double a, double b) {
    NonlinearityFamily fam;
    fam.kind = FamilyKind::generic;
    fam.name = "tanh_sin";
    fam.f = [a](std::size_t, double u) { return a * std::tanh(u); };
    fam.df = [a](std::size_t, double u) { const double c = 1.0 / std::cosh(u); return a * c * c; };
    fam.d2f = [a](std::size_t, double u) { const double c = 1.0 / std::cosh(u); return -2.0 * a * std::tanh(u) * c * c; };
    fam.h = [b](std::size_t, double u) { return b * std::sin(u); };
    fam.dh = [b](std::size_t, double u) { return b * std::cos(u); };
    fam.d2h = [b](std::size_t, double u) { return -b * std::sin(u); };
    fam.D_f = std::abs(a);
    fam.M_f = 4.0 / (3.0 * std::sqrt(3.0)) * std::abs(a);  // max |2 tanh sech^2|
    fam.D_h = std::abs(b);
    fam.M_h = std::abs(b);
    fam.delta = std::numeric_limits<double>::infinity();
    return fam;
  }

  /// f_i(u) = a (cos u - 1), h_i(u) = b (1 - cos u); both vanish to second
  /// order at 0.
  static NonlinearityFamily stability_default(double a, double b, double delta = 1.0) {
    NonlinearityFamily fam;
    fam.kind = FamilyKind::stability;
    fam.name = "cos";
    fam.f = [a](std::size_t, double u) { return a * (std::cos(u) - 1.0); };
    fam.df = [a](std::size_t, double u) { return -a * std::sin(u); };
    fam.d2f = [a](std::size_t, double u) { return -a * std::cos(u); };
    fam.h = [b](std::size_t, double u) { return b * (1.0 - std::cos(u)); };
    fam.dh = [b](std::size_t, double u) { return b * std::sin(u); };
    fam.d2h = [b](std::size_t, double u) { return b * std::cos(u); };
    fam.D_f = fam.M_f = std::abs(a);
    fam.D_h = fam.M_h = std::abs(b);
    fam.delta = delta;
    const double s = std::abs(a) + std::abs(b);
    fam.derivative_envelope = [s](double r) { return s * std::sin(std::min(r, std::numbers::pi / 2.0)); };
    return fam;
  }

  /// f = h = 0.
  static NonlinearityFamily zero() {
    NonlinearityFamily fam = stability_default(0.0, 0.0);
    fam.name = "zero";
    return fam;
  }
};

struct LatticeModel {
  double nu = 1.0;
  double lambda = 1.0;
  std::size_t window = 16;
  Boundary boundary = Boundary::periodic;
  NonlinearityFamily family = NonlinearityFamily::generic_default(0.5, 0.5);

  void validate() const {
    require(nu >= 0.0 && std::isfinite(nu), "nu must be nonnegative");
    require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive");
    require(window >= 3, "window must have at least 3 nodes");
    require(static_cast<bool>(family.f) && static_cast<bool>(family.h), "nonlinearity family is incomplete");
  }

  /// Storage index of lattice site 0 (storage index i is site i - N/2).
  std::size_t center() const { return window / 2; }
};

namespace detail {
inline void check_length(const LatticeModel& m, const Eigen::VectorXd& u) {
  require(static_cast<std::size_t>(u.size()) == m.window, "vector length must equal the window size");
}
inline double neighbor(const LatticeModel& m, const Eigen::VectorXd& u, Eigen::Index i) {
  const auto n = static_cast<Eigen::Index>(m.window);
  if (i >= 0 && i < n) return u(i);
  if (m.boundary == Boundary::zero_padded) return 0.0;
  return u((i + n) % n);
}
}  // namespace detail

/// (A u)_i = -nu (u_{i-1} - 2 u_i + u_{i+1}); periodic wrap or zero padding.
inline Eigen::VectorXd apply_A(const LatticeModel& m, const Eigen::VectorXd& u) {
  detail::check_length(m, u);
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    out(i) = -m.nu * (detail::neighbor(m, u, i - 1) - 2.0 * u(i) + detail::neighbor(m, u, i + 1));
  }
  return out;
}

/// (B u)_i = sqrt(nu) (u_{i+1} - u_i). In zero-padded mode B maps the window
/// to its N + 1 edges, entry e = 0..N being edge (e-1, e).
inline Eigen::VectorXd apply_B(const LatticeModel& m, const Eigen::VectorXd& u) {
  detail::check_length(m, u);
  const double s = std::sqrt(m.nu);
  const auto n = u.size();
  if (m.boundary == Boundary::periodic) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = s * (u((i + 1) % n) - u(i));
    return out;
  }
  Eigen::VectorXd out(n + 1);
  for (Eigen::Index e = 0; e <= n; ++e) {
    out(e) = s * (detail::neighbor(m, u, e) - detail::neighbor(m, u, e - 1));
  }
  return out;
}

/// Adjoint of apply_B: (B* v)_i = sqrt(nu) (v_{i-1} - v_i) with the matching
/// index convention.
inline Eigen::VectorXd apply_B_star(const LatticeModel& m, const Eigen::VectorXd& v) {
  const double s = std::sqrt(m.nu);
  const auto n = static_cast<Eigen::Index>(m.window);
  Eigen::VectorXd out(n);
  if (m.boundary == Boundary::periodic) {
    require(v.size() == n, "vector length must equal the window size");
    for (Eigen::Index i = 0; i < n; ++i) out(i) = s * (v((i - 1 + n) % n) - v(i));
    return out;
  }
  require(v.size() == n + 1, "zero-padded B* acts on the N + 1 edges");
  for (Eigen::Index i = 0; i < n; ++i) out(i) = s * (v(i) - v(i + 1));
  return out;
}

inline Eigen::VectorXd apply_A_lambda(const LatticeModel& m, const Eigen::VectorXd& u) {
  return apply_A(m, u) + m.lambda * u;
}

inline Eigen::MatrixXd a_lambda_matrix(const LatticeModel& m) {
  m.validate();
  const auto n = static_cast<Eigen::Index>(m.window);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 2.0 * m.nu + m.lambda;
    if (i > 0) a(i, i - 1) = -m.nu;
    if (i + 1 < n) a(i, i + 1) = -m.nu;
  }
  if (m.boundary == Boundary::periodic) {
    a(0, n - 1) += -m.nu;
    a(n - 1, 0) += -m.nu;
  }
  return a;
}

/// S(t) = exp(-A_lambda t) through the eigendecomposition A_lambda = V diag(mu) V^T.
/// Immutable after construction.
class Semigroup {
 public:
  explicit Semigroup(const LatticeModel& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a_lambda_matrix(m));
    require(es.info() == Eigen::Success, "eigendecomposition of A_lambda failed");
    mu_ = es.eigenvalues();
    v_ = es.eigenvectors();
  }

  const Eigen::VectorXd& eigenvalues() const { return mu_; }
  const Eigen::MatrixXd& eigenvectors() const { return v_; }
  std::size_t dim() const { return static_cast<std::size_t>(mu_.size()); }

  /// ||A_lambda|| = largest eigenvalue.
  double generator_norm() const { return mu_.maxCoeff(); }

  Eigen::VectorXd apply(double t, const Eigen::VectorXd& u) const {
    require(t >= 0.0, "semigroup time must be nonnegative");
    require(u.size() == mu_.size(), "vector length must equal the window size");
    return v_ * ((-mu_ * t).array().exp() * (v_.transpose() * u).array()).matrix();
  }

  Eigen::MatrixXd matrix(double t) const {
    require(t >= 0.0, "semigroup time must be nonnegative");
    return v_ * (-mu_ * t).array().exp().matrix().asDiagonal() * v_.transpose();
  }

  /// Operator norm of a function of A_lambda given by its action on eigenvalues.
  template <class Fn>
  double spectral_norm(Fn&& g) const {
    double best = 0.0;
    for (Eigen::Index k = 0; k < mu_.size(); ++k) best = std::max(best, std::abs(g(mu_(k))));
    return best;
  }

  double norm(double t) const {
    return spectral_norm([t](double m) { return std::exp(-m * t); });
  }
  /// ||S(t) - S(s)||.
  double norm_difference(double t, double s) const {
    return spectral_norm([t, s](double m) { return std::exp(-m * t) - std::exp(-m * s); });
  }

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd v_;
};

inline double operator_norm_A_lambda(const LatticeModel& m) { return Semigroup(m).generator_norm(); }

inline Eigen::VectorXd semigroup_apply(const LatticeModel& m, double t, const Eigen::VectorXd& u) {
  return Semigroup(m).apply(t, u);
}

struct SemigroupBoundsReport {
  std::size_t checks = 0;
  std::size_t violations = 0;
  // largest lhs / rhs seen for each bound (0 when rhs and lhs vanish)
  double exponential = 0.0;      // ||S(t)|| <= e^{-lambda t}
  double minus_identity = 0.0;   // ||S(t-s) - id|| <= ||A|| (t-s)
  double difference = 0.0;       // ||S(t) - S(s)|| <= ||A|| (t-s) e^{-lambda s}
  double holder_kernel = 0.0;    // |||S(t - .)|||_{beta,0,t} <= ||A|| t^{1-beta}
  double holder_increment = 0.0; // |||S(t-.) - S(s-.)|||_{beta,0,s} <= ||A||^2 (t-s) s^{1-beta}
  bool ok() const { return violations == 0; }
};

/// Checks the semigroup estimates for all pairs of times in t_grid (sorted
/// ascending, t_grid[0] >= 0). Operator norms are exact (via eigenvalues);
/// Hoelder seminorms are suprema over pairs of grid times.
inline SemigroupBoundsReport verify_semigroup_bounds(const LatticeModel& m, std::span<const double> t_grid,
                                                     double beta) {
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    require(t_grid[k] >= 0.0, "times must be nonnegative");
    require(k == 0 || t_grid[k] > t_grid[k - 1], "times must be strictly increasing");
  }
  const Semigroup sg(m);
  const double a = sg.generator_norm();
  const double lam = m.lambda;
  SemigroupBoundsReport rep;
  const double slack = 1e-12;
  auto record = [&](double lhs, double rhs, double& worst) {
    ++rep.checks;
    if (lhs > rhs * (1.0 + slack) + 1e-15) ++rep.violations;
    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
  };
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const double t = t_grid[j];
    record(sg.norm(t), std::exp(-lam * t), rep.exponential);
    for (std::size_t i = 0; i <= j; ++i) {
      const double s = t_grid[i];
      record(sg.norm_difference(t - s, 0.0), a * (t - s), rep.minus_identity);
      record(sg.norm_difference(t, s), a * (t - s) * std::exp(-lam * s), rep.difference);
    }
    // kernel seminorm over r1 < r2 <= t on the grid
    double kernel = 0.0;
    for (std::size_t i2 = 0; i2 <= j; ++i2)
      for (std::size_t i1 = 0; i1 < i2; ++i1) {
        const double r1 = t_grid[i1], r2 = t_grid[i2];
        kernel = std::max(kernel, sg.norm_difference(t - r2, t - r1) / std::pow(r2 - r1, beta));
      }
    if (t > 0.0) record(kernel, a * std::pow(t, 1.0 - beta), rep.holder_kernel);
    for (std::size_t is = 1; is < j; ++is) {
      const double s = t_grid[is];
      double inc = 0.0;
      for (std::size_t i2 = 0; i2 <= is; ++i2)
        for (std::size_t i1 = 0; i1 < i2; ++i1) {
          const double r1 = t_grid[i1], r2 = t_grid[i2];
          const double q = sg.spectral_norm([&](double mu) {
            return std::exp(-mu * (t - r2)) - std::exp(-mu * (s - r2)) - std::exp(-mu * (t - r1)) +
                   std::exp(-mu * (s - r1));
          });
          inc = std::max(inc, q / std::pow(r2 - r1, beta));
        }
      record(inc, a * a * (t - s) * std::pow(s, 1.0 - beta), rep.holder_increment);
    }
  }
  return rep;
}

/// f(u) = (f_i(u_i)).
inline Eigen::VectorXd nonlinearity_f(const LatticeModel& m, const Eigen::VectorXd& u) {
  detail::check_length(m, u);
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out(i) = m.family.f(static_cast<std::size_t>(i), u(i));
  return out;
}

/// Diagonal of h(u): h(u) v = (h_i(u_i) v_i).
inline Eigen::VectorXd nonlinearity_h(const LatticeModel& m, const Eigen::VectorXd& u) {
  detail::check_length(m, u);
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out(i) = m.family.h(static_cast<std::size_t>(i), u(i));
  return out;
}

/// Diagonal of Df(u).
inline Eigen::VectorXd derivative_f(const LatticeModel& m, const Eigen::VectorXd& u) {
  detail::check_length(m, u);
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out(i) = m.family.df(static_cast<std::size_t>(i), u(i));
  return out;
}

/// Diagonal of the map v -> Dh(u) v, i.e. (h_i'(u_i)).
inline Eigen::VectorXd derivative_h(const LatticeModel& m, const Eigen::VectorXd& u) {
  detail::check_length(m, u);
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out(i) = m.family.dh(static_cast<std::size_t>(i), u(i));
  return out;
}

struct Quadruple {
  Eigen::VectorXd u, v, w, z;
};

struct HPropertiesReport {
  std::size_t checked = 0;
  std::size_t mn_violations = 0;
  std::size_t lipschitz_violations = 0;
  std::size_t derivative_violations = 0;
  double worst_mn_ratio = 0.0;  // lhs / rhs of (MN), 0 when both vanish
  bool ok() const { return mn_violations == 0 && lipschitz_violations == 0 && derivative_violations == 0; }
};

/// Checks, per quadruple, the four-point inequality
///   ||h(u)-h(v)-(h(w)-h(z))||_HS <= sqrt(2) D_h ||u-v-(w-z)|| + 2 M_h ||u-w|| (||u-v|| + ||w-z||),
/// the Lipschitz bound ||h(u)-h(v)||_HS <= D_h ||u-v|| and ||Dh(u)|| <= D_h.
/// Hilbert-Schmidt norms of diagonal operators are Euclidean norms of diagonals.
inline HPropertiesReport verify_h_properties(const LatticeModel& m, std::span<const Quadruple> quads) {
  HPropertiesReport rep;
  const double dh = m.family.D_h, mh = m.family.M_h;
  const double tol = 1e-12;
  for (const auto& q : quads) {
    ++rep.checked;
    const Eigen::VectorXd hu = nonlinearity_h(m, q.u), hv = nonlinearity_h(m, q.v);
    const Eigen::VectorXd hw = nonlinearity_h(m, q.w), hz = nonlinearity_h(m, q.z);
    const double lhs = (hu - hv - (hw - hz)).norm();
    const double rhs = std::sqrt(2.0) * dh * (q.u - q.v - (q.w - q.z)).norm() +
                       2.0 * mh * (q.u - q.w).norm() * ((q.u - q.v).norm() + (q.w - q.z).norm());
    if (lhs > rhs + tol * (1.0 + rhs)) ++rep.mn_violations;
    if (rhs > 0.0) rep.worst_mn_ratio = std::max(rep.worst_mn_ratio, lhs / rhs);
    if ((hu - hv).norm() > dh * (q.u - q.v).norm() + tol) ++rep.lipschitz_violations;
    if (derivative_h(m, q.u).cwiseAbs().maxCoeff() > dh + tol) ++rep.derivative_violations;
  }
  return rep;
}

}  // namespace latticefbm
