#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "latticefbm/error.hpp"
#include "latticefbm/fbm_noise.hpp"
#include "latticefbm/holder_spaces.hpp"
#include "latticefbm/lattice_ops.hpp"
#include "latticefbm/sampled_path.hpp"
#include "latticefbm/young_integral.hpp"

namespace latticefbm {

struct SolverConfig {
  HolderConfig holder = HolderConfig::defaults_for_hurst(0.75);
  double horizon = 1.0;  // T
  double grid_step = 1.0 / 1024.0;
  double picard_tol = 1e-10;
  int picard_max_iter = 100;
  bool rho_auto = true;
  double rho = 0.0;        // initial weight when rho_auto, fixed weight otherwise
  double rho_max = 65536.0;
  IntegralBackend backend = IntegralBackend::young_sums;

  void validate() const {
    require(picard_tol > 0.0, "picard_tol must be positive");
    require(picard_max_iter >= 1, "picard_max_iter must be at least 1");
    require(horizon > 0.0 && std::isfinite(horizon), "horizon T must be positive");
    require(rho >= 0.0 && rho <= rho_max, "rho must lie in [0, rho_max]");
    TimeGrid::covering(0.0, horizon, grid_step);
  }
  void validate(double hurst) const {
    validate();
    holder.validate(hurst);
  }
  std::size_t steps() const { return TimeGrid::covering(0.0, horizon, grid_step).count - 1; }
  TimeGrid grid() const { return TimeGrid::covering(0.0, horizon, grid_step); }
};

/// Optional state map applied before f and h (the cut-off in the truncated
/// problems). Identity when empty.
using StateMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct MildSolution {
  SampledPath path;
  int iterations = 0;
  std::vector<double> contraction_factors;  // successive-difference ratios at the final rho
  double residual = 0.0;           // ||T(u) - u||_{beta,rho} / ||u||_{beta,rho} of the returned path
  double ball_radius_used = 0.0;   // 2 (1 + ||A_lambda|| T^{1-beta}) ||x|| + 1
  double max_iterate_norm = 0.0;   // max_k ||u^k||_{beta,rho}
  double rho = 0.0;
  bool converged = false;
  bool ball_ok = false;
  std::string failure;
};

namespace detail {

inline SampledPath driver_window(const NoisePath& noise, double horizon) {
  if (noise.t_max() < horizon - 1e-9 * noise.step() || noise.t_min() > 1e-9 * noise.step()) {
    throw HorizonError("noise window does not cover [0, " + std::to_string(horizon) + "]");
  }
  return noise.window(0.0, horizon);
}

inline void check_driver(const SampledPath& u, const SampledPath& driver, const LatticeModel& m) {
  require(u.same_grid(driver), "iterate and noise grids differ");
  require(u.nodes() == m.window && driver.nodes() == m.window, "node count must equal the window size");
  require(std::abs(u.t_start()) <= 1e-12, "paths must start at t = 0");
}

/// Rows: node-wise f and h diagonals of the (mapped) state at each grid point.
inline std::pair<RowMatrix, RowMatrix> evaluate_nonlinearities(const SampledPath& u, const LatticeModel& m,
                                                               const StateMap* map) {
  const auto rows = static_cast<Eigen::Index>(u.size());
  const auto n = static_cast<Eigen::Index>(u.nodes());
  RowMatrix fv(rows, n), hv(rows, n);
  for (Eigen::Index k = 0; k < rows; ++k) {
    Eigen::VectorXd v = u.values().row(k).transpose();
    if (map && *map) v = (*map)(v);
    fv.row(k) = nonlinearity_f(m, v).transpose();
    hv.row(k) = nonlinearity_h(m, v).transpose();
  }
  return {std::move(fv), std::move(hv)};
}

/// Left-point convolution sum_{j<k} S(t_k - t_j) g_j in the eigenbasis,
/// for increments g given row-wise (rows 0..M-1).
inline RowMatrix convolve_left(const Semigroup& sg, const RowMatrix& g, double step, std::size_t points) {
  const auto& v = sg.eigenvectors();
  const Eigen::ArrayXd decay = (-sg.eigenvalues() * step).array().exp();
  const auto n = static_cast<Eigen::Index>(sg.dim());
  RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(points), n);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k + 1 < points; ++k) {
    c = (decay * (c + v.transpose() * g.row(static_cast<Eigen::Index>(k)).transpose()).array()).matrix();
    out.row(static_cast<Eigen::Index>(k + 1)) = (v * c).transpose();
  }
  return out;
}

/// Fractional-backend convolution t_k -> int_0^{t_k} S(t_k - r) diag(h(r)) dw(r).
/// In the eigenbasis the (m, i) scalar integrand is e^{-mu_m (t_k - r)} h_i(r);
/// D^alpha_{0+} at a node depends only on data left of it, so the plus
/// derivatives of e^{mu_m r} h_i(r) are formed once on the whole window.
inline RowMatrix convolve_fractional(const Semigroup& sg, const RowMatrix& hv, const SampledPath& w,
                                     double alpha) {
  const std::size_t points = w.size();
  const std::size_t cells = points - 1;
  const auto n = static_cast<Eigen::Index>(sg.dim());
  const Eigen::VectorXd& mu = sg.eigenvalues();
  const Eigen::MatrixXd& v = sg.eigenvectors();
  const double horizon = w.t_end() - w.t_start();
  require(mu.maxCoeff() * horizon < 600.0,
          "fractional backend: ||A_lambda|| T too large for the exponential rescaling");
  FractionalQuadrature q(w.step(), cells, alpha);
  const std::size_t p = q.nodes_per_cell();

  // plus[m * n + i][node]
  std::vector<std::vector<double>> plus(static_cast<std::size_t>(n * n));
  std::vector<double> z(points);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < points; ++j)
        z[j] = std::exp(mu(m) * w.time(j)) * hv(static_cast<Eigen::Index>(j), i);
      q.plus_at_nodes(z, plus[static_cast<std::size_t>(m * n + i)]);
    }
  RowMatrix out = RowMatrix::Zero(static_cast<Eigen::Index>(points), n);
  std::vector<double> minus, wi;
  Eigen::MatrixXd jmi(n, n);  // jmi(m, i)
  for (std::size_t k = 1; k < points; ++k) {
    jmi.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      wi.resize(k + 1);
      for (std::size_t j = 0; j <= k; ++j) wi[j] = w(j, static_cast<std::size_t>(i));
      q.minus_at_nodes(wi, minus);
      for (Eigen::Index m = 0; m < n; ++m) {
        const auto& pl = plus[static_cast<std::size_t>(m * n + i)];
        double acc = 0.0;
        for (std::size_t c = 0; c < k; ++c)
          for (std::size_t l = 0; l < p; ++l) acc += q.weight(c, l) * pl[c * p + l] * minus[c * p + l];
        jmi(m, i) = std::exp(-mu(m) * w.time(k)) * acc;
      }
    }
    // result_j = sum_m V_jm sum_i V_im J_mi
    const Eigen::VectorXd modal = (jmi.cwiseProduct(v.transpose())).rowwise().sum();
    out.row(static_cast<Eigen::Index>(k)) = (v * modal).transpose();
  }
  return out;
}

}  // namespace detail

/// t -> int_0^t S(t - r) h(u(r)) dw(r) on the grid of u.
inline SampledPath stochastic_convolution(const SampledPath& u, const SampledPath& driver, const LatticeModel& m,
                                          const SolverConfig& cfg, const StateMap* map = nullptr) {
  detail::check_driver(u, driver, m);
  const Semigroup sg(m);
  auto [fv, hv] = detail::evaluate_nonlinearities(u, m, map);
  (void)fv;
  if (cfg.backend == IntegralBackend::fractional) {
    detail::check_integral_alpha(cfg.holder);
    return SampledPath(0.0, u.step(), detail::convolve_fractional(sg, hv, driver, cfg.holder.alpha));
  }
  const auto rows = static_cast<Eigen::Index>(u.size());
  const RowMatrix dw = driver.values().bottomRows(rows - 1) - driver.values().topRows(rows - 1);
  const RowMatrix g = hv.topRows(rows - 1).cwiseProduct(dw);
  return SampledPath(0.0, u.step(), detail::convolve_left(sg, g, u.step(), u.size()));
}

/// T_{x,w}(u)[t] = S(t) x + int_0^t S(t-r) f(u(r)) dr + int_0^t S(t-r) h(u(r)) dw(r)
/// at every grid time. Drift by left-point rule; the stochastic term by the
/// configured backend (left-point Young sums by default).
inline SampledPath picard_map(const Eigen::VectorXd& x, const SampledPath& u, const SampledPath& driver,
                              const LatticeModel& m, const SolverConfig& cfg, const StateMap* map = nullptr,
                              const Semigroup* semigroup = nullptr) {
  detail::check_driver(u, driver, m);
  require(static_cast<std::size_t>(x.size()) == m.window, "initial value length must equal the window size");
  std::optional<Semigroup> own;
  if (!semigroup) own.emplace(m);
  const Semigroup& sg = semigroup ? *semigroup : *own;
  auto [fv, hv] = detail::evaluate_nonlinearities(u, m, map);
  const auto rows = static_cast<Eigen::Index>(u.size());
  const double h = u.step();
  const RowMatrix dw = driver.values().bottomRows(rows - 1) - driver.values().topRows(rows - 1);

  RowMatrix out;
  if (cfg.backend == IntegralBackend::fractional) {
    detail::check_integral_alpha(cfg.holder);
    out = detail::convolve_left(sg, h * fv.topRows(rows - 1), h, u.size()) +
          detail::convolve_fractional(sg, hv, driver, cfg.holder.alpha);
  } else {
    const RowMatrix g = h * fv.topRows(rows - 1) + hv.topRows(rows - 1).cwiseProduct(dw);
    out = detail::convolve_left(sg, g, h, u.size());
  }
  const Eigen::VectorXd xhat = sg.eigenvectors().transpose() * x;
  for (Eigen::Index k = 0; k < rows; ++k) {
    const Eigen::ArrayXd e = (-sg.eigenvalues() * (static_cast<double>(k) * h)).array().exp();
    out.row(k) += (sg.eigenvectors() * (e * xhat.array()).matrix()).transpose();
  }
  return SampledPath(0.0, h, std::move(out));
}

inline SampledPath picard_map(const Eigen::VectorXd& x, const SampledPath& u, const NoisePath& noise,
                              const LatticeModel& m, const SolverConfig& cfg, const StateMap* map = nullptr) {
  return picard_map(x, u, detail::driver_window(noise, u.t_end()), m, cfg, map);
}

/// t -> S(t) x on the solver grid.
inline SampledPath free_evolution(const Eigen::VectorXd& x, const LatticeModel& m, const TimeGrid& grid) {
  const Semigroup sg(m);
  return SampledPath::from_function(grid, m.window, [&](double t) -> Eigen::VectorXd { return sg.apply(t, x); });
}

struct PicardOptions {
  const StateMap* map = nullptr;
  std::optional<SampledPath> initial;  // defaults to S(.) x
};

/// Picard iteration for the mild equation on [0, T], driver given on the grid.
///
/// Successive differences are measured in the rho-weighted beta-norm. With
/// rho_auto, rho starts at cfg.rho and is doubled (0 -> 1 -> 2 -> ...) while the
/// latest ratio of successive differences is >= 1/2, up to rho_max; the
/// reported factors are recomputed at the final rho. Ratios whose earlier
/// difference is at rounding level (below 1e-13 of the iterate norm) are not
/// counted. Stops when the difference is at most picard_tol times the norm of
/// the new iterate.
inline MildSolution picard_solve(const Eigen::VectorXd& x, const SampledPath& driver, const LatticeModel& m,
                                 const SolverConfig& cfg, const PicardOptions& opt = {}) {
  cfg.validate();
  m.validate();
  require(static_cast<std::size_t>(x.size()) == m.window, "initial value length must equal the window size");
  const TimeGrid grid = cfg.grid();
  require(driver.size() == grid.count && std::abs(driver.step() - grid.step) <= 1e-12 * grid.step,
          "noise grid does not match the solver grid");
  const Semigroup sg(m);
  const double beta = cfg.holder.beta;

  std::vector<SampledPath> iterates;
  iterates.push_back(opt.initial ? *opt.initial : free_evolution(x, m, grid));
  require(iterates[0].same_grid(driver), "initial iterate grid does not match the solver grid");

  MildSolution sol;
  double rho = cfg.rho;
  std::vector<double> dn;  // difference norms at the current rho
  auto diff_norm = [&](std::size_t k, double r) { return holder_norm(iterates[k + 1] - iterates[k], beta, r); };
  auto counted = [&](std::size_t k, double r) {
    return dn[k - 1] > 1e-13 * holder_norm(iterates[k], beta, r);
  };

  for (int it = 1; it <= cfg.picard_max_iter; ++it) {
    iterates.push_back(picard_map(x, iterates.back(), driver, m, cfg, opt.map, &sg));
    const std::size_t k = iterates.size() - 2;
    dn.push_back(diff_norm(k, rho));
    if (cfg.rho_auto && k >= 1 && counted(k, rho)) {
      while (dn[k] >= 0.5 * dn[k - 1] && rho < cfg.rho_max) {
        rho = std::min(cfg.rho_max, rho == 0.0 ? 1.0 : 2.0 * rho);
        for (std::size_t j = 0; j <= k; ++j) dn[j] = diff_norm(j, rho);
        if (!counted(k, rho)) break;
      }
    }
    sol.iterations = it;
    const double un = holder_norm(iterates.back(), beta, rho);
    if (dn[k] <= cfg.picard_tol * un || dn[k] == 0.0) {
      sol.converged = true;
      break;
    }
  }

  // factors at the final rho
  for (std::size_t k = 1; k < dn.size(); ++k) {
    if (counted(k, rho)) sol.contraction_factors.push_back(dn[k] / dn[k - 1]);
  }
  sol.rho = rho;
  sol.path = iterates.back();
  const SampledPath next = picard_map(x, sol.path, driver, m, cfg, opt.map, &sg);
  const double un = holder_norm(sol.path, beta, rho);
  const double rn = holder_norm(next - sol.path, beta, rho);
  sol.residual = un > 0.0 ? rn / un : rn;
  sol.ball_radius_used =
      2.0 * (1.0 + sg.generator_norm() * std::pow(cfg.horizon, 1.0 - beta)) * x.norm() + 1.0;
  for (const auto& u : iterates) sol.max_iterate_norm = std::max(sol.max_iterate_norm, holder_norm(u, beta, rho));
  sol.ball_ok = sol.max_iterate_norm <= sol.ball_radius_used;
  if (!sol.converged) {
    std::string hist;
    for (double f : sol.contraction_factors) hist += (hist.empty() ? "" : ",") + std::to_string(f);
    sol.failure = "no convergence after " + std::to_string(cfg.picard_max_iter) + " iterations (rho=" +
                  std::to_string(rho) + "; factors " + hist + ")";
  }
  return sol;
}

inline MildSolution picard_solve(const Eigen::VectorXd& x, const NoisePath& noise, const LatticeModel& m,
                                 const SolverConfig& cfg, const PicardOptions& opt = {}) {
  cfg.validate(noise.config().hurst);
  return picard_solve(x, detail::driver_window(noise, cfg.horizon), m, cfg, opt);
}

/// u_{k+1} = S(h) (u_k + h f(u_k) + h(u_k) (w(t_{k+1}) - w(t_k))), in physical space.
inline SampledPath euler_solve(const Eigen::VectorXd& x, const SampledPath& driver, const LatticeModel& m,
                               double horizon, double step) {
  m.validate();
  require(static_cast<std::size_t>(x.size()) == m.window, "initial value length must equal the window size");
  const TimeGrid grid = TimeGrid::covering(0.0, horizon, step);
  require(driver.on_grid(0.0) && driver.on_grid(horizon), "noise window does not cover [0, T]");
  const std::size_t i0 = driver.index_of(0.0);
  const double ratio = step / driver.step();
  const auto stride = static_cast<std::size_t>(std::llround(ratio));
  require(stride >= 1 && std::abs(ratio - static_cast<double>(stride)) <= 1e-9 * ratio,
          "Euler step must be a multiple of the noise step");
  const Eigen::MatrixXd s = Semigroup(m).matrix(step);
  RowMatrix out(static_cast<Eigen::Index>(grid.count), static_cast<Eigen::Index>(m.window));
  Eigen::VectorXd u = x;
  out.row(0) = u.transpose();
  for (std::size_t k = 0; k + 1 < grid.count; ++k) {
    const Eigen::VectorXd dw = driver.at_index(i0 + (k + 1) * stride) - driver.at_index(i0 + k * stride);
    u = s * (u + step * nonlinearity_f(m, u) + nonlinearity_h(m, u).cwiseProduct(dw));
    out.row(static_cast<Eigen::Index>(k + 1)) = u.transpose();
  }
  return SampledPath(0.0, step, std::move(out));
}

inline SampledPath euler_solve(const Eigen::VectorXd& x, const NoisePath& noise, const LatticeModel& m,
                               const SolverConfig& cfg) {
  cfg.validate();
  return euler_solve(x, noise.samples(), m, cfg.horizon, cfg.grid_step);
}

struct CocycleReport {
  double final_discrepancy = 0.0;  // relative, at time t + tau
  double path_discrepancy = 0.0;   // relative sup over [tau, t + tau]
  bool converged = true;
};

/// Compares phi(t + tau, w, x) with phi(t, theta_tau w, phi(tau, w, x)) using
/// three independent Picard solves.
inline CocycleReport verify_cocycle(const Eigen::VectorXd& x, const NoisePath& noise, const LatticeModel& m,
                                    const SolverConfig& cfg, double t, double tau) {
  require(t >= 0.0 && tau >= 0.0, "cocycle times must be nonnegative");
  if (noise.t_max() < t + tau - 1e-9 * noise.step()) {
    throw HorizonError("noise horizon does not cover t + tau");
  }
  CocycleReport rep;
  if (t == 0.0 || tau == 0.0) return rep;
  auto solve = [&](const NoisePath& w, const Eigen::VectorXd& x0, double horizon) {
    SolverConfig c = cfg;
    c.horizon = horizon;
    MildSolution s = picard_solve(x0, w, m, c);
    rep.converged = rep.converged && s.converged;
    return s.path;
  };
  const SampledPath whole = solve(noise, x, t + tau);
  const SampledPath first = solve(noise, x, tau);
  const NoisePath shifted = wiener_shift(noise, tau);
  const SampledPath second = solve(shifted, first.at_index(first.size() - 1), t);
  const std::size_t off = whole.index_of(tau);
  double sup = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < second.size(); ++k) {
    sup = std::max(sup, (whole.at_index(off + k) - second.at_index(k)).norm());
    scale = std::max(scale, whole.at_index(off + k).norm());
  }
  const Eigen::VectorXd a = whole.at_index(whole.size() - 1);
  const Eigen::VectorXd b = second.at_index(second.size() - 1);
  rep.final_discrepancy = (a - b).norm() / std::max(a.norm(), 1e-300);
  rep.path_discrepancy = sup / std::max(scale, 1e-300);
  return rep;
}

struct ConvolutionBoundsReport {
  std::vector<double> rho_ladder;
  std::vector<double> lhs;           // ||int S h dw||_{beta,rho,0,T}
  std::vector<double> ratio;         // lhs / (|||w|||_{beta',0,T} ||h(u)||_{beta,rho,0,T})
  std::vector<double> k_effective;   // ratio / ratio at rho = 0
  std::vector<double> k_theory;      // k(rho) with a = -alpha, b = alpha + beta' - beta - 1
  double c_sup = 0.0;                // sup / ((1 + ||A||) |||w||| ||h(u)||_beta)
  double c_seminorm = 0.0;           // seminorm / ((1 + ||A||)^2 |||w||| ||h(u)||_beta)
  bool ratio_nonincreasing = true;
  bool degenerate = false;           // zero right-hand side (zero noise or h(u) = 0)
};

/// Evaluates both sides of the weighted and unweighted stochastic-convolution
/// estimates on the grid for the path u.
inline ConvolutionBoundsReport verify_convolution_bounds(const SampledPath& u, const SampledPath& driver,
                                                         const LatticeModel& m, const SolverConfig& cfg,
                                                         std::vector<double> rho_ladder = {0.0, 1.0, 10.0, 50.0}) {
  ConvolutionBoundsReport rep;
  rep.rho_ladder = std::move(rho_ladder);
  const auto& hc = cfg.holder;
  const SampledPath conv = stochastic_convolution(u, driver, m, cfg);
  const auto [fv, hv] = detail::evaluate_nonlinearities(u, m, nullptr);
  const SampledPath hpath(0.0, u.step(), hv);
  const double wn = holder_seminorm_weighted(driver, hc.beta_prime, 0.0);
  const double anorm = operator_norm_A_lambda(m);
  const double h0 = holder_norm(hpath, hc.beta, 0.0);
  rep.degenerate = !(wn * h0 > 0.0);
  for (double rho : rep.rho_ladder) {
    const double l = holder_norm(conv, hc.beta, rho);
    const double hn = holder_norm(hpath, hc.beta, rho);
    rep.lhs.push_back(l);
    rep.ratio.push_back(rep.degenerate ? 0.0 : l / (wn * hn));
    rep.k_theory.push_back(k_rho(rho, -hc.alpha, hc.alpha + hc.beta_prime - hc.beta - 1.0, cfg.horizon));
  }
  for (std::size_t i = 0; i < rep.ratio.size(); ++i) {
    rep.k_effective.push_back(rep.ratio[0] > 0.0 ? rep.ratio[i] / rep.ratio[0] : 0.0);
    if (i > 0 && rep.ratio[i] > rep.ratio[i - 1] * (1.0 + 1e-12)) rep.ratio_nonincreasing = false;
  }
  if (!rep.degenerate) {
    rep.c_sup = sup_norm_weighted(conv, 0.0) / ((1.0 + anorm) * wn * h0);
    rep.c_seminorm = holder_seminorm_weighted(conv, hc.beta, 0.0) / ((1.0 + anorm) * (1.0 + anorm) * wn * h0);
  }
  return rep;
}

}  // namespace latticefbm
