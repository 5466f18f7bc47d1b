#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include "latticefbm/error.hpp"
#include "latticefbm/sampled_path.hpp"

namespace latticefbm {

/// Exponent chain 1/2 < beta < beta_prime < H, 1 - beta_prime < alpha < beta,
/// plus the exponential weight rho >= 0.
struct HolderConfig {
  double beta = 0.0;
  double beta_prime = 0.0;
  double alpha = 0.0;
  double rho = 0.0;

  /// Midpoint choices: beta and beta_prime split (1/2, H) in thirds and alpha
  /// sits in the middle of (1 - beta_prime, beta).
  static HolderConfig defaults_for_hurst(double hurst) {
    require(hurst > 0.5 && hurst < 1.0, "hurst must lie in (0.5,1)");
    HolderConfig c;
    c.beta = 0.5 + (hurst - 0.5) / 3.0;
    c.beta_prime = 0.5 + 2.0 * (hurst - 0.5) / 3.0;
    c.alpha = (1.0 - c.beta_prime + c.beta) / 2.0;
    return c;
  }

  std::vector<std::string> violations(double hurst) const {
    std::vector<std::string> out;
    if (!(beta > 0.5)) out.emplace_back("beta must exceed 1/2");
    if (!(beta_prime > beta)) out.emplace_back("beta_prime must exceed beta");
    if (!(beta_prime < hurst)) out.emplace_back("beta_prime must be below hurst");
    if (!(alpha > 1.0 - beta_prime)) out.emplace_back("alpha must exceed 1 - beta_prime");
    if (!(alpha < beta)) out.emplace_back("alpha must be below beta");
    if (!(rho >= 0.0) || !std::isfinite(rho)) out.emplace_back("rho must be nonnegative");
    return out;
  }

  void validate(double hurst) const {
    const auto v = violations(hurst);
    if (!v.empty()) throw DomainError(v.front());
  }
};

/// max_k e^{-rho (t_k - T1)} ||u(t_k)||.
inline double sup_norm_weighted(const SampledPath& u, double rho) {
  require(rho >= 0.0, "rho must be nonnegative");
  const auto& v = u.values();
  double best = 0.0;
  for (Eigen::Index k = 0; k < v.rows(); ++k) {
    const double w = std::exp(-rho * static_cast<double>(k) * u.step());
    best = std::max(best, w * v.row(k).norm());
  }
  return best;
}

/// max over grid pairs s < t of e^{-rho (t - T1)} ||u(t) - u(s)|| / (t - s)^beta.
///
/// Exact over the grid. For a fixed left index i the quantity
/// (G_j + W_j n_i) / ((j - i) h)^beta, with G_j the suffix maximum of W_l n_l
/// and n_l the distance of u_l to a fixed center, bounds every remaining
/// pair and is nonincreasing in j, so the scan stops once it falls below the
/// running maximum.
inline double holder_seminorm_weighted(const SampledPath& u, double beta, double rho) {
  require(beta > 0.0, "beta must be positive");
  require(rho >= 0.0, "rho must be nonnegative");
  const auto& v = u.values();
  const Eigen::Index m = v.rows();
  const double h = u.step();

  Eigen::RowVectorXd center = 0.5 * (v.colwise().minCoeff() + v.colwise().maxCoeff());
  std::vector<double> weight(static_cast<std::size_t>(m));
  std::vector<double> dist(static_cast<std::size_t>(m));
  std::vector<double> lag_pow(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k) {
    weight[k] = std::exp(-rho * static_cast<double>(k) * h);
    dist[k] = (v.row(k) - center).norm();
    lag_pow[k] = std::pow(static_cast<double>(k) * h, -beta);
  }
  std::vector<double> suffix(static_cast<std::size_t>(m) + 1, 0.0);
  for (Eigen::Index k = m - 1; k >= 0; --k) {
    suffix[k] = std::max(suffix[k + 1], weight[k] * dist[k]);
  }

  double best = 0.0;
  for (Eigen::Index k = 1; k < m; ++k) {
    best = std::max(best, weight[k] * (v.row(k) - v.row(k - 1)).norm() * lag_pow[1]);
  }
  for (Eigen::Index i = 0; i + 2 < m; ++i) {
    for (Eigen::Index j = i + 2; j < m; ++j) {
      const double lp = lag_pow[j - i];
      if ((suffix[j] + weight[j] * dist[i]) * lp <= best) break;
      const double q = weight[j] * (v.row(j) - v.row(i)).norm() * lp;
      if (q > best) best = q;
    }
  }
  return best;
}

inline double holder_norm(const SampledPath& u, double beta, double rho) {
  return sup_norm_weighted(u, rho) + holder_seminorm_weighted(u, beta, rho);
}

/// k(rho) = sup_{0 <= s < t <= T} int_s^t e^{-rho (t-r)} (r-s)^a (t-r)^b dr.
///
/// The integral depends on (s, t) only through L = t - s, so the supremum is
/// one-dimensional. The inner integral uses tanh-sinh quadrature; the sup is
/// taken on a log-spaced ladder of L followed by Brent refinement, and is
/// therefore a grid approximation from below.
inline double k_rho_integral(double rho, double a, double b, double length) {
  using boost::math::quadrature::tanh_sinh;
  static thread_local tanh_sinh<double> integrator;
  const double rl = rho * length;
  const double tol = 1e-13;
  // y in [0, 1/2]: weight e^{-rho L (1 - y)} y^a (1 - y)^b.
  auto left = [&](double y) { return std::exp(-rl * (1.0 - y)) * std::pow(y, a) * std::pow(1.0 - y, b); };
  // z = 1 - y in [0, 1/2].
  auto right = [&](double z) { return std::exp(-rl * z) * std::pow(1.0 - z, a) * std::pow(z, b); };
  double total = integrator.integrate(left, 0.0, 0.5, tol);
  const double c = (rl > 2.0) ? std::min(0.5, 1.0 / rl) : 0.5;
  total += integrator.integrate(right, 0.0, c, tol);
  if (c < 0.5) total += integrator.integrate(right, c, 0.5, tol);
  return std::pow(length, a + b + 1.0) * total;
}

inline double k_rho(double rho, double a, double b, double T) {
  require(a > -1.0, "k_rho requires a > -1");
  require(b > -1.0, "k_rho requires b > -1");
  require(a + b + 1.0 > 0.0, "k_rho requires a + b + 1 > 0");
  require(T > 0.0 && std::isfinite(T), "k_rho requires T > 0");
  require(rho >= 0.0 && std::isfinite(rho), "k_rho requires rho >= 0");
  if (rho == 0.0) return k_rho_integral(0.0, a, b, T);

  constexpr int kLadder = 240;
  const double lo = T * 1e-9;
  std::vector<double> ls(kLadder);
  std::vector<double> gs(kLadder);
  int arg = 0;
  for (int i = 0; i < kLadder; ++i) {
    ls[i] = lo * std::pow(T / lo, static_cast<double>(i) / (kLadder - 1));
    gs[i] = k_rho_integral(rho, a, b, ls[i]);
    if (gs[i] > gs[arg]) arg = i;
  }
  double best = gs[arg];
  if (arg > 0 && arg < kLadder - 1) {
    auto neg = [&](double l) { return -k_rho_integral(rho, a, b, l); };
    const auto r = boost::math::tools::brent_find_minima(neg, ls[arg - 1], ls[arg + 1], 40);
    best = std::max(best, -r.second);
  }
  return best;
}

}  // namespace latticefbm
