#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "latticefbm/error.hpp"
#include "latticefbm/holder_spaces.hpp"
#include "latticefbm/sampled_path.hpp"

namespace latticefbm {

/// Node-diagonal operator path Z(t) = diag(entries(t)), the shape of h(u).
struct DiagonalOperatorPath {
  SampledPath entries;
};

/// Dense operator path, one N x N matrix per grid point.
class DenseOperatorPath {
 public:
  DenseOperatorPath(double t_start, double step, std::vector<Eigen::MatrixXd> values)
      : t_start_(t_start), step_(step), values_(std::move(values)) {
    require(step_ > 0.0, "path step must be positive");
    require(values_.size() >= 2, "an operator path needs at least 2 grid points");
    for (const auto& m : values_) {
      require(m.rows() == values_[0].rows() && m.cols() == values_[0].cols() && m.rows() == m.cols(),
              "operator path entries must be square and of equal size");
      require(m.allFinite(), "operator path contains non-finite entries");
    }
  }

  static DenseOperatorPath identity(const TimeGrid& grid, std::size_t n) {
    const auto ni = static_cast<Eigen::Index>(n);
    return DenseOperatorPath(grid.t_start, grid.step,
                             std::vector<Eigen::MatrixXd>(grid.count, Eigen::MatrixXd::Identity(ni, ni)));
  }

  std::size_t size() const { return values_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(values_[0].rows()); }
  double t_start() const { return t_start_; }
  double step() const { return step_; }
  const Eigen::MatrixXd& at_index(std::size_t k) const { return values_[k]; }

  /// Entry (j, i) as a scalar path.
  SampledPath entry(std::size_t j, std::size_t i) const {
    RowMatrix v(static_cast<Eigen::Index>(size()), 1);
    for (std::size_t k = 0; k < size(); ++k)
      v(static_cast<Eigen::Index>(k), 0) = values_[k](static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    return SampledPath(t_start_, step_, std::move(v));
  }

 private:
  double t_start_;
  double step_;
  std::vector<Eigen::MatrixXd> values_;
};

namespace detail {

/// alpha * int over q with r - q in [d, e] of (Z(r) - Z(q)) (r - q)^{-1-alpha},
/// Z linear with slope m and Z(r) - Z(r - d) - m d = kd. Exact.
inline double plus_piece(double kd, double m, double d, double e, double alpha) {
  const double tail = (d > 0.0) ? kd * (std::pow(d, -alpha) - std::pow(e, -alpha)) : 0.0;
  const double lin = m * alpha / (1.0 - alpha) * (std::pow(e, 1.0 - alpha) - (d > 0.0 ? std::pow(d, 1.0 - alpha) : 0.0));
  return tail + lin;
}

/// (1 - alpha) * int over q with q - r in [d, e] of (w(q) - w(r)) (q - r)^{alpha-2},
/// w linear with slope n and w(r + d) - w(r) - n d = kd. Exact.
inline double minus_piece(double kd, double n, double d, double e, double alpha) {
  const double tail = (d > 0.0) ? kd * (std::pow(d, alpha - 1.0) - std::pow(e, alpha - 1.0)) : 0.0;
  const double lin = n * (1.0 - alpha) / alpha * (std::pow(e, alpha) - (d > 0.0 ? std::pow(d, alpha) : 0.0));
  return tail + lin;
}

inline void check_alpha(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
}

}  // namespace detail

/// D^alpha_{s+} Z [r] for the piecewise-linear interpolant of a scalar path,
/// evaluated in closed form cell by cell.
inline double weyl_derivative_plus(const SampledPath& z, double alpha, double s, double t, double r) {
  detail::check_alpha(alpha);
  require(z.nodes() == 1, "weyl_derivative_plus expects a scalar path");
  require(s < r && r < t, "r must lie in (s,t)");
  const std::size_t is = z.index_of(s);
  z.index_of(t);
  const double h = z.step();
  const double xr = (r - z.t_start()) / h;
  auto c = static_cast<std::size_t>(std::floor(xr));
  if (c >= z.size() - 1) c = z.size() - 2;
  const double xi = xr - static_cast<double>(c);
  const double mc = (z(c + 1, 0) - z(c, 0)) / h;
  const double zr = z(c, 0) + mc * xi * h;

  double acc = detail::plus_piece(0.0, mc, 0.0, xi * h, alpha);
  for (std::size_t j = is; j < c; ++j) {
    const double m = (z(j + 1, 0) - z(j, 0)) / h;
    const double d = r - z.time(j + 1);
    acc += detail::plus_piece(zr - z(j + 1, 0) - m * d, m, d, d + h, alpha);
  }
  return (zr * std::pow(r - s, -alpha) + acc) / std::tgamma(1.0 - alpha);
}

/// D^{1-alpha}_{t-} w_{t-} [r] in the real-valued convention in which the
/// integral is the plain product integral of the two derivatives:
/// (1/Gamma(alpha)) ((w(t) - w(r)) / (t - r)^{1-alpha}
///   + (1 - alpha) int_r^t (w(q) - w(r)) / (q - r)^{2-alpha} dq).
inline double weyl_derivative_minus(const SampledPath& w, double alpha, double s, double t, double r) {
  detail::check_alpha(alpha);
  require(w.nodes() == 1, "weyl_derivative_minus expects a scalar path");
  require(s < r && r < t, "r must lie in (s,t)");
  w.index_of(s);
  const std::size_t it = w.index_of(t);
  const double h = w.step();
  const double xr = (r - w.t_start()) / h;
  auto c = static_cast<std::size_t>(std::floor(xr));
  if (c >= w.size() - 1) c = w.size() - 2;
  const double xi = xr - static_cast<double>(c);
  const double nc = (w(c + 1, 0) - w(c, 0)) / h;
  const double wr = w(c, 0) + nc * xi * h;

  double acc = detail::minus_piece(0.0, nc, 0.0, (1.0 - xi) * h, alpha);
  for (std::size_t j = c + 1; j < it; ++j) {
    const double n = (w(j + 1, 0) - w(j, 0)) / h;
    const double d = w.time(j) - r;
    acc += detail::minus_piece(w(j, 0) - wr - n * d, n, d, d + h, alpha);
  }
  return ((w(it, 0) - wr) * std::pow(t - r, alpha - 1.0) + acc) / std::tgamma(alpha);
}

/// Fractional-calculus quadrature on a uniform grid.
///
/// Integrates int_s^t D^alpha_{s+}Z[r] D^{1-alpha}_{t-}w[r] dr for grid data
/// read as piecewise-linear interpolants. Both derivatives are exact at each
/// outer node (closed-form cell pieces); the outer integral uses Gauss-Legendre
/// on cell halves graded toward the cell ends, with the first half-cell mapped
/// so that the (r - s)^{-alpha} singularity becomes smooth. Power tables depend
/// only on cell distance and are shared by all cells, so one integral over C
/// cells costs O(C^2) per outer node offset.
class FractionalQuadrature {
 public:
  static constexpr int kOrder = 12;

  FractionalQuadrature(double step, std::size_t max_cells, double alpha, double grading = 3.0)
      : step_(step), max_cells_(max_cells), alpha_(alpha) {
    detail::check_alpha(alpha);
    require(step > 0.0, "quadrature step must be positive");
    require(max_cells >= 1, "quadrature needs at least one cell");
    const auto& xs = boost::math::quadrature::gauss<double, kOrder>::abscissa();
    const auto& ws = boost::math::quadrature::gauss<double, kOrder>::weights();
    std::vector<std::pair<double, double>> rule;  // (y in (0,1), weight on [0,1])
    for (std::size_t i = 0; i < xs.size(); ++i) {
      rule.emplace_back(0.5 * (1.0 + xs[i]), 0.25 * ws[i]);
      rule.emplace_back(0.5 * (1.0 - xs[i]), 0.25 * ws[i]);
    }
    const double p_first = 1.0 / (1.0 - alpha);
    for (int type = 0; type < 2; ++type) {
      auto& nodes = types_[type];
      const double p = (type == 0) ? p_first : grading;
      for (const auto& [y, wy] : rule) {
        nodes.push_back(make_node(0.5 * std::pow(y, p), step * p * std::pow(y, p - 1.0) * wy));
      }
      for (const auto& [y, wy] : rule) {
        nodes.push_back(make_node(1.0 - 0.5 * std::pow(y, grading), step * grading * std::pow(y, grading - 1.0) * wy));
      }
    }
    for (auto& t : types_) {
      for (auto& nd : t) build_tables(nd);
    }
    gamma_plus_ = std::tgamma(1.0 - alpha);
    gamma_minus_ = std::tgamma(alpha);
  }

  double step() const { return step_; }
  double alpha() const { return alpha_; }
  std::size_t max_cells() const { return max_cells_; }
  std::size_t nodes_per_cell() const { return types_[0].size(); }

  /// D^alpha_{s+}Z at all outer nodes of the C = z.size() - 1 cells.
  void plus_at_nodes(std::span<const double> z, std::vector<double>& out) const {
    const std::size_t c_total = cells_of(z.size());
    const std::size_t p = nodes_per_cell();
    out.assign(c_total * p, 0.0);
    std::vector<double> slope(c_total);
    for (std::size_t j = 0; j < c_total; ++j) slope[j] = (z[j + 1] - z[j]) / step_;
    const double ratio = alpha_ / (1.0 - alpha_);
    for (std::size_t c = 0; c < c_total; ++c) {
      const auto& nodes = types_[c == 0 ? 0 : 1];
      for (std::size_t l = 0; l < p; ++l) {
        const Node& nd = nodes[l];
        const double zr = z[c] + slope[c] * nd.xi * step_;
        double acc = zr * nd.pp[c] + slope[c] * ratio * nd.pq[0];
        // cells j = c-1-k, k = 0..c-1
        for (std::size_t k = 0; k < c; ++k) {
          const std::size_t j = c - 1 - k;
          acc += (zr - z[j + 1] - slope[j] * nd.pd[k]) * nd.pdp[k] + slope[j] * nd.pdq[k];
        }
        out[c * p + l] = acc / gamma_plus_;
      }
    }
  }

  /// D^{1-alpha}_{t-}w at all outer nodes, t the last grid point of w.
  void minus_at_nodes(std::span<const double> w, std::vector<double>& out) const {
    const std::size_t c_total = cells_of(w.size());
    const std::size_t p = nodes_per_cell();
    out.assign(c_total * p, 0.0);
    std::vector<double> slope(c_total);
    for (std::size_t j = 0; j < c_total; ++j) slope[j] = (w[j + 1] - w[j]) / step_;
    const double ratio = (1.0 - alpha_) / alpha_;
    const double wt = w[c_total];
    for (std::size_t c = 0; c < c_total; ++c) {
      const auto& nodes = types_[c == 0 ? 0 : 1];
      for (std::size_t l = 0; l < p; ++l) {
        const Node& nd = nodes[l];
        const double wr = w[c] + slope[c] * nd.xi * step_;
        const std::size_t last = c_total - c - 1;
        double acc = (wt - wr) * nd.mp[last] + slope[c] * ratio * nd.mq[0];
        // cells j = c+1+k
        for (std::size_t k = 0; k < last; ++k) {
          const std::size_t j = c + 1 + k;
          acc += (w[j] - wr - slope[j] * nd.md[k]) * nd.mdp[k] + slope[j] * nd.mdq[k];
        }
        out[c * p + l] = acc / gamma_minus_;
      }
    }
  }

  /// Outer weight of node l in cell c.
  double weight(std::size_t c, std::size_t l) const { return types_[c == 0 ? 0 : 1][l].weight; }
  /// Position of node l in cell c relative to the cell start, in units of the step.
  double offset(std::size_t c, std::size_t l) const { return types_[c == 0 ? 0 : 1][l].xi; }

  double combine(const std::vector<double>& plus, const std::vector<double>& minus) const {
    const std::size_t p = nodes_per_cell();
    const std::size_t c_total = plus.size() / p;
    double acc = 0.0;
    for (std::size_t c = 0; c < c_total; ++c) {
      const auto& nodes = types_[c == 0 ? 0 : 1];
      double cell = 0.0;
      for (std::size_t l = 0; l < p; ++l) cell += nodes[l].weight * plus[c * p + l] * minus[c * p + l];
      acc += cell;
    }
    return acc;
  }

  /// int_s^t Z dw for z, w sampled on the same C + 1 grid points.
  double integrate(std::span<const double> z, std::span<const double> w) const {
    require(z.size() == w.size(), "integrand and integrator sizes differ");
    if (z.size() < 2) return 0.0;
    std::vector<double> a, b;
    plus_at_nodes(z, a);
    minus_at_nodes(w, b);
    return combine(a, b);
  }

 private:
  struct Node {
    double xi;
    double weight;
    // plus tables, distance (xi + k) h
    std::vector<double> pp, pq, pd, pdp, pdq;
    // minus tables, distance (1 - xi + k) h
    std::vector<double> mp, mq, md, mdp, mdq;
  };
  static Node make_node(double xi, double weight) {
    Node n;
    n.xi = xi;
    n.weight = weight;
    return n;
  }

  std::size_t cells_of(std::size_t points) const {
    require(points >= 2, "need at least 2 grid points");
    require(points - 1 <= max_cells_, "interval exceeds the quadrature table size");
    return points - 1;
  }

  void build_tables(Node& nd) const {
    const std::size_t n = max_cells_ + 1;
    const double a = alpha_;
    nd.pp.resize(n); nd.pq.resize(n); nd.pd.resize(n);
    nd.mp.resize(n); nd.mq.resize(n); nd.md.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double dp = (nd.xi + static_cast<double>(k)) * step_;
      const double dm = (1.0 - nd.xi + static_cast<double>(k)) * step_;
      nd.pd[k] = dp;
      nd.pp[k] = std::pow(dp, -a);
      nd.pq[k] = std::pow(dp, 1.0 - a);
      nd.md[k] = dm;
      nd.mp[k] = std::pow(dm, a - 1.0);
      nd.mq[k] = std::pow(dm, a);
    }
    nd.pdp.resize(n - 1); nd.pdq.resize(n - 1); nd.mdp.resize(n - 1); nd.mdq.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      nd.pdp[k] = nd.pp[k] - nd.pp[k + 1];
      nd.pdq[k] = a / (1.0 - a) * (nd.pq[k + 1] - nd.pq[k]);
      nd.mdp[k] = nd.mp[k] - nd.mp[k + 1];
      nd.mdq[k] = (1.0 - a) / a * (nd.mq[k + 1] - nd.mq[k]);
    }
  }

  double step_;
  std::size_t max_cells_;
  double alpha_;
  double gamma_plus_ = 1.0;
  double gamma_minus_ = 1.0;
  std::vector<Node> types_[2];
};

namespace detail {

inline void check_integral_alpha(const HolderConfig& holder) {
  const double lo = 1.0 - holder.beta_prime;
  const double hi = holder.beta;
  if (!(holder.alpha > lo && holder.alpha < hi)) {
    throw DomainError("alpha must lie in (1 - beta_prime, beta) = (" + std::to_string(lo) + ", " +
                      std::to_string(hi) + ")");
  }
}

struct AlignedRange {
  std::size_t z_first;
  std::size_t w_first;
  std::size_t cells;
};

inline AlignedRange align(double z_t0, double z_step, std::size_t z_size, const SampledPath& w,
                          double s, double t) {
  require(std::abs(z_step - w.step()) <= 1e-12 * w.step(), "integrand and integrator grids differ");
  require(t >= s, "integration bounds must satisfy s <= t");
  const SampledPath probe(z_t0, z_step, RowMatrix::Zero(static_cast<Eigen::Index>(z_size), 1));
  const std::size_t zs = probe.index_of(s);
  const std::size_t zt = probe.index_of(t);
  const std::size_t ws = w.index_of(s);
  w.index_of(t);
  return AlignedRange{zs, ws, zt - zs};
}

inline std::vector<double> column(const SampledPath& p, std::size_t node, std::size_t first, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = p(first + k, node);
  return out;
}

}  // namespace detail

/// Scalar fractional integral of z against w on the same grid (C + 1 points).
inline double fractional_integral_scalar(std::span<const double> z, std::span<const double> w,
                                         double step, double alpha) {
  if (z.size() < 2) return 0.0;
  FractionalQuadrature q(step, z.size() - 1, alpha);
  return q.integrate(z, w);
}

/// int_s^t Z dw for node-diagonal Z by the fractional formula. The double sum
/// collapses to one scalar integral per node.
inline Eigen::VectorXd integral_fractional(const DiagonalOperatorPath& z, const SampledPath& omega,
                                           double s, double t, const HolderConfig& holder) {
  detail::check_integral_alpha(holder);
  const auto& e = z.entries;
  require(e.nodes() == omega.nodes(), "integrand and integrator node counts differ");
  const auto r = detail::align(e.t_start(), e.step(), e.size(), omega, s, t);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(omega.nodes()));
  if (r.cells == 0) return out;
  FractionalQuadrature q(omega.step(), r.cells, holder.alpha);
  for (std::size_t i = 0; i < omega.nodes(); ++i) {
    const auto zi = detail::column(e, i, r.z_first, r.cells + 1);
    const auto wi = detail::column(omega, i, r.w_first, r.cells + 1);
    out(static_cast<Eigen::Index>(i)) = q.integrate(zi, wi);
  }
  return out;
}

/// Dense overload: (int Z dw)_j = sum_i int Z_ji dw_i.
inline Eigen::VectorXd integral_fractional(const DenseOperatorPath& z, const SampledPath& omega,
                                           double s, double t, const HolderConfig& holder) {
  detail::check_integral_alpha(holder);
  require(z.dim() == omega.nodes(), "integrand and integrator node counts differ");
  const auto r = detail::align(z.t_start(), z.step(), z.size(), omega, s, t);
  const std::size_t n = omega.nodes();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (r.cells == 0) return out;
  FractionalQuadrature q(omega.step(), r.cells, holder.alpha);
  std::vector<double> plus, minus;
  std::vector<double> zji(r.cells + 1);
  for (std::size_t i = 0; i < n; ++i) {
    q.minus_at_nodes(detail::column(omega, i, r.w_first, r.cells + 1), minus);
    for (std::size_t j = 0; j < n; ++j) {
      bool zero = true;
      for (std::size_t k = 0; k <= r.cells; ++k) {
        zji[k] = z.at_index(r.z_first + k)(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
        zero = zero && zji[k] == 0.0;
      }
      if (zero) continue;
      q.plus_at_nodes(zji, plus);
      out(static_cast<Eigen::Index>(j)) += q.combine(plus, minus);
    }
  }
  return out;
}

/// Left-point sums sum_k Z(t_k) (w(t_{k+1}) - w(t_k)) over the grid of [s, t].
inline Eigen::VectorXd integral_young_sums(const DiagonalOperatorPath& z, const SampledPath& omega,
                                           double s, double t) {
  const auto& e = z.entries;
  require(e.nodes() == omega.nodes(), "integrand and integrator node counts differ");
  const auto r = detail::align(e.t_start(), e.step(), e.size(), omega, s, t);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(omega.nodes()));
  for (std::size_t k = 0; k < r.cells; ++k) {
    out += (e.at_index(r.z_first + k).array() *
            (omega.at_index(r.w_first + k + 1) - omega.at_index(r.w_first + k)).array())
               .matrix();
  }
  return out;
}

inline Eigen::VectorXd integral_young_sums(const DenseOperatorPath& z, const SampledPath& omega,
                                           double s, double t) {
  require(z.dim() == omega.nodes(), "integrand and integrator node counts differ");
  const auto r = detail::align(z.t_start(), z.step(), z.size(), omega, s, t);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(omega.nodes()));
  for (std::size_t k = 0; k < r.cells; ++k) {
    out += z.at_index(r.z_first + k) * (omega.at_index(r.w_first + k + 1) - omega.at_index(r.w_first + k));
  }
  return out;
}

enum class IntegralBackend { young_sums, fractional };

inline Eigen::VectorXd integrate(IntegralBackend backend, const DiagonalOperatorPath& z,
                                 const SampledPath& omega, double s, double t, const HolderConfig& holder) {
  return backend == IntegralBackend::fractional ? integral_fractional(z, omega, s, t, holder)
                                                : integral_young_sums(z, omega, s, t);
}

/// theta_tau applied to a sampled path: w(. + tau) - w(tau).
inline SampledPath shift_path(const SampledPath& w, double tau) {
  const std::size_t k = w.index_of(tau);
  RowMatrix v = w.values().rowwise() - w.values().row(static_cast<Eigen::Index>(k));
  return SampledPath(w.t_start() - tau, w.step(), std::move(v));
}

/// Time translation Z(. + tau) (values unchanged, grid moved).
inline SampledPath translate_path(const SampledPath& z, double tau) {
  return SampledPath(z.t_start() - tau, z.step(), z.values());
}

struct CalculusResiduals {
  double linear_z = 0.0;
  double linear_omega = 0.0;
  double additivity = 0.0;
  double shift = 0.0;
  double max() const { return std::max(std::max(linear_z, linear_omega), std::max(additivity, shift)); }
};

struct CalculusReport {
  CalculusResiduals sums;
  CalculusResiduals fractional;
};

namespace detail {
inline double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / (1.0 + b.norm());
}
inline CalculusResiduals calculus_residuals(IntegralBackend be, const SampledPath& z, const SampledPath& z2,
                                            const SampledPath& w, const SampledPath& w2, double s,
                                            double tau, double t, const HolderConfig& holder) {
  constexpr double a = 0.7;
  constexpr double b = -1.3;
  auto I = [&](const SampledPath& zz, const SampledPath& ww, double lo, double hi) {
    return integrate(be, DiagonalOperatorPath{zz}, ww, lo, hi, holder);
  };
  CalculusResiduals r;
  const Eigen::VectorXd base = I(z, w, s, t);
  r.linear_z = rel(I(a * z + b * z2, w, s, t), a * base + b * I(z2, w, s, t));
  r.linear_omega = rel(I(z, a * w + b * w2, s, t), a * base + b * I(z, w2, s, t));
  r.additivity = rel(I(z, w, s, tau) + I(z, w, tau, t), base);
  r.shift = rel(I(translate_path(z, tau), shift_path(w, tau), s - tau, t - tau), base);
  return r;
}
}  // namespace detail

/// Residuals of linearity in Z and in w, additivity at tau and the shift
/// identity int_s^t Z dw = int_{s-tau}^{t-tau} Z(. + tau) d theta_tau w,
/// each relative to 1 + |reference|, for both backends.
inline CalculusReport verify_integral_calculus(const SampledPath& z, const SampledPath& z2,
                                               const SampledPath& omega, const SampledPath& omega2,
                                               double s, double tau, double t, const HolderConfig& holder) {
  require(s <= tau && tau <= t, "tau must lie in [s,t]");
  CalculusReport rep;
  rep.sums = detail::calculus_residuals(IntegralBackend::young_sums, z, z2, omega, omega2, s, tau, t, holder);
  rep.fractional = detail::calculus_residuals(IntegralBackend::fractional, z, z2, omega, omega2, s, tau, t, holder);
  return rep;
}

struct YoungBoundReport {
  double empirical_constant = 0.0;  // max ratio over evaluated pairs
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // pairs with a vanishing denominator
};

/// Ratio |int_s^t Z dw| / ((1 + (t-s)^beta) (t-s)^beta' ||Z||_beta |||w|||_beta')
/// over `pairs` random grid pairs in the common window; norms are taken over
/// the whole window.
inline YoungBoundReport verify_young_bound(const SampledPath& z, const SampledPath& omega,
                                           const HolderConfig& holder, std::size_t pairs,
                                           std::uint64_t seed,
                                           IntegralBackend backend = IntegralBackend::young_sums) {
  require(z.same_grid(omega) && z.nodes() == omega.nodes(), "integrand and integrator grids differ");
  const double zn = holder_norm(z, holder.beta, 0.0);
  const double wn = holder_seminorm_weighted(omega, holder.beta_prime, 0.0);
  YoungBoundReport rep;
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, z.size() - 1);
  for (std::size_t n = 0; n < pairs; ++n) {
    std::size_t i = pick(gen), j = pick(gen);
    if (i == j) j = (i + 1 < z.size()) ? i + 1 : i - 1;
    if (i > j) std::swap(i, j);
    const double s = z.time(i), t = z.time(j);
    const double len = t - s;
    const double den = (1.0 + std::pow(len, holder.beta)) * std::pow(len, holder.beta_prime) * zn * wn;
    if (!(den > 0.0)) {
      ++rep.skipped;
      continue;
    }
    const double num = integrate(backend, DiagonalOperatorPath{z}, omega, s, t, holder).norm();
    rep.empirical_constant = std::max(rep.empirical_constant, num / den);
    ++rep.evaluated;
  }
  return rep;
}

}  // namespace latticefbm
