#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "latticefbm/config.hpp"
#include "latticefbm/fbm_noise.hpp"
#include "latticefbm/holder_spaces.hpp"
#include "latticefbm/lattice_ops.hpp"
#include "latticefbm/mild_solver.hpp"
#include "latticefbm/stability_lab.hpp"
#include "latticefbm/young_integral.hpp"

namespace latticefbm {

enum ExitStatus : int { kExitOk = 0, kExitFailure = 1, kExitNotCertified = 2 };

/// x_i = sin(0.3 i + seed), the initial datum of solve and cocycle runs.
inline Eigen::VectorXd default_initial(std::size_t n, std::uint64_t seed) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = std::sin(0.3 * static_cast<double>(i) + static_cast<double>(seed));
  return x;
}

/// The stability initial datum points along the peaked sigma profile.
inline Eigen::VectorXd stability_direction(std::size_t n) {
  const std::vector<double> s = NoiseConfig::default_sigma(n, 1.0);
  return Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(n));
}

namespace detail {

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + root_.string() + ": " + ec.message());
  }
  std::ofstream open(const std::string& name) const {
    const auto p = root_ / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
    return os;
  }
  void close(std::ofstream& os, const std::string& name) const {
    os.close();
    if (!os) throw std::runtime_error("write failed for " + (root_ / name).string());
  }
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

inline int run_fbm(const ExperimentConfig& c, const OutputDir& out, std::ostream& log) {
  const std::string name = "fbm.csv";
  auto csv = out.open(name);
  fmt::print(csv, "seed,used_cholesky,seminorm_0_1,increment_sq_0_1\n");
  for (std::uint64_t seed : c.seeds) {
    const NoisePath w = sample_noise(c.noise(seed));
    const double semi = estimate_holder_seminorm_path(w, c.holder().beta_prime, 0.0, 1.0);
    const double incr = w.samples().at(1.0).squaredNorm();
    fmt::print(csv, "{},{},{},{}\n", seed, w.used_cholesky() ? 1 : 0, semi, incr);
    const std::string pname = fmt::format("noise_{}.csv", seed);
    auto p = out.open(pname);
    write_noise_csv(p, w);
    out.close(p, pname);
    fmt::print(log, "seed {}: seminorm[0,1] = {:.6g}, |B(1)|^2 = {:.6g}{}\n", seed, semi, incr,
               w.used_cholesky() ? " (cholesky fallback)" : "");
  }
  out.close(csv, name);
  return kExitOk;
}

inline int run_integrate(const ExperimentConfig& c, const OutputDir& out, std::ostream& log) {
  const std::string name = "integrate.csv";
  auto csv = out.open(name);
  fmt::print(csv, "seed,young_sums,fractional,rel_diff,calculus_sums,calculus_fractional,young_constant\n");
  const HolderConfig h = c.holder();
  bool ok = true;
  for (std::uint64_t seed : c.seeds) {
    NoiseConfig nc = c.noise(seed);
    nc.sigma = {1.0};
    const NoisePath noise = sample_noise(nc);
    NoiseConfig nc2 = nc;
    nc2.seed = derive_stream_seed(seed, 1);
    const NoisePath noise2 = sample_noise(nc2);
    const SampledPath w = noise.window(0.0, 1.0), w2 = noise2.window(0.0, 1.0);
    const SampledPath z(0.0, w.step(), w.values().array().cos().matrix());
    const SampledPath z2(0.0, w.step(), (w2.values().array() * 0.5).sin().matrix());
    const DiagonalOperatorPath zo{z};
    const double sums = integral_young_sums(zo, w, 0.0, 1.0)(0);
    const double frac = integral_fractional(zo, w, 0.0, 1.0, h)(0);
    const double rd = std::abs(frac - sums) / std::max(std::abs(sums), 1e-300);
    const CalculusReport cr = verify_integral_calculus(z, z2, w, w2, 0.0, 0.5, 1.0, h);
    const YoungBoundReport yb = verify_young_bound(z, w, h, 500, seed);
    fmt::print(csv, "{},{},{},{},{},{},{}\n", seed, sums, frac, rd, cr.sums.max(), cr.fractional.max(),
               yb.empirical_constant);
    const bool pass = cr.sums.max() <= 1e-10 && cr.fractional.max() <= 1e-4;
    ok = ok && pass;
    fmt::print(log, "seed {}: sums {:.10g}, fractional {:.10g}, calculus residuals {:.2e} / {:.2e} {}\n", seed, sums,
               frac, cr.sums.max(), cr.fractional.max(), pass ? "PASS" : "FAIL");
  }
  out.close(csv, name);
  return ok ? kExitOk : kExitFailure;
}

inline int run_solve(const ExperimentConfig& c, const OutputDir& out, std::ostream& log) {
  const std::string name = "solve.csv";
  auto csv = out.open(name);
  fmt::print(csv, "seed,iterations,rho,last_factor,residual,ball_radius,max_iterate_norm,converged,ball_ok\n");
  const LatticeModel m = c.model();
  const SolverConfig sc = c.solver();
  bool ok = true;
  for (std::uint64_t seed : c.seeds) {
    const NoisePath w = sample_noise(c.noise(seed));
    const MildSolution s = picard_solve(default_initial(m.window, seed), w, m, sc);
    const double last = s.contraction_factors.empty() ? 0.0 : s.contraction_factors.back();
    fmt::print(csv, "{},{},{},{},{},{},{},{},{}\n", seed, s.iterations, s.rho, last, s.residual, s.ball_radius_used,
               s.max_iterate_norm, s.converged ? 1 : 0, s.ball_ok ? 1 : 0);
    const std::string pname = fmt::format("solution_{}.csv", seed);
    auto p = out.open(pname);
    write_path_csv(p, s.path);
    out.close(p, pname);
    ok = ok && s.converged && s.ball_ok;
    fmt::print(log, "seed {}: {} iterations at rho = {}, residual {:.2e}, ball {:.4g}/{:.4g} {}{}\n", seed,
               s.iterations, s.rho, s.residual, s.max_iterate_norm, s.ball_radius_used,
               s.converged && s.ball_ok ? "PASS" : "FAIL", s.failure.empty() ? "" : " (" + s.failure + ")");
  }
  out.close(csv, name);
  return ok ? kExitOk : kExitFailure;
}

inline int run_cocycle(const ExperimentConfig& c, const OutputDir& out, std::ostream& log) {
  const std::string name = "cocycle.csv";
  auto csv = out.open(name);
  fmt::print(csv, "seed,t,tau,final_discrepancy,path_discrepancy,converged\n");
  const LatticeModel m = c.model();
  const SolverConfig sc = c.solver();
  bool ok = true;
  for (std::uint64_t seed : c.seeds) {
    const NoisePath w = sample_noise(c.noise(seed));
    const CocycleReport r = verify_cocycle(default_initial(m.window, seed), w, m, sc, c.cocycle_t, c.cocycle_tau);
    fmt::print(csv, "{},{},{},{},{},{}\n", seed, c.cocycle_t, c.cocycle_tau, r.final_discrepancy,
               r.path_discrepancy, r.converged ? 1 : 0);
    ok = ok && r.converged;
    fmt::print(log, "seed {}: final discrepancy {:.3e}, path discrepancy {:.3e}\n", seed, r.final_discrepancy,
               r.path_discrepancy);
  }
  out.close(csv, name);
  return ok ? kExitOk : kExitFailure;
}

}  // namespace detail

/// CSV with columns n, norm_beta, R, R_hat, gronwall_bound, cutoff_active.
inline void write_stability_csv(std::ostream& os, const StabilityReport& r) {
  fmt::print(os, "n,norm_beta,R,R_hat,gronwall_bound,cutoff_active\n");
  for (std::size_t n = 0; n < r.norm_beta.size(); ++n) {
    fmt::print(os, "{},{},{},{},{},{}\n", n, r.norm_beta[n], r.R[n], r.R_hat[n], r.gronwall[n],
               r.cutoff_active[n] ? 1 : 0);
  }
}

inline void write_stability_summary(std::ostream& os, const StabilityReport& r) {
  fmt::print(os, "fitted_rate = {}\n", r.fit.rate);
  fmt::print(os, "fit_r2 = {}\n", r.fit.r2);
  fmt::print(os, "fit_status = {}\n",
             r.fit.status == FitStatus::ok ? "ok" : r.fit.status == FitStatus::all_zero ? "all_zero" : "insufficient_data");
  fmt::print(os, "target_mu = {}\n", r.mu);
  fmt::print(os, "envelope_rate = {}\n", r.target_rate);
  fmt::print(os, "C = {}\n", r.C);
  fmt::print(os, "x_norm = {}\n", r.x_norm);
  fmt::print(os, "cutoff_ever_active = {}\n", r.any_cutoff_active() ? "true" : "false");
  fmt::print(os, "envelope_holds = {}\n", r.envelope_holds ? "true" : "false");
  fmt::print(os, "gronwall_hypothesis_holds = {}\n", r.gronwall_hypothesis_holds ? "true" : "false");
  fmt::print(os, "verdict = {}\n", r.certified ? "certified" : "not certified");
}

namespace detail {

inline int run_stability(const ExperimentConfig& c, const OutputDir& out, std::ostream& log) {
  const LatticeModel m = c.model();
  const SolverConfig sc = c.solver();
  StabilityConfig st = c.stability();
  if (st.C == 0.0) st.C = calibrated_constant(c.hurst, sc.holder, m, sc.grid_step);
  bool all = true;
  for (std::uint64_t seed : c.seeds) {
    const NoisePath w = sample_noise(c.noise(seed));
    const Eigen::VectorXd x = initial_from_neighborhood(w, st, m, sc.holder, stability_direction(m.window));
    const StabilityReport r = concatenated_solve(x, w, st, m, sc);
    const std::string name = fmt::format("stability_{}.csv", seed);
    auto csv = out.open(name);
    write_stability_csv(csv, r);
    out.close(csv, name);
    fmt::print(log, "[seed {}]\n", seed);
    write_stability_summary(log, r);
    all = all && r.certified;
  }
  return all ? kExitOk : kExitNotCertified;
}

inline int run_appendix(const ExperimentConfig& c, const OutputDir& out, std::ostream& log) {
  const std::uint64_t seed = c.seeds.front();
  const auto trials = static_cast<std::size_t>(c.trials);
  const GronwallSuiteReport g = gronwall_suite(trials, seed);
  const L8SuiteReport l8 = lemma_l8_suite(trials, seed);
  std::vector<double> ladder;
  for (int k = 0; k <= 20; ++k) ladder.push_back(0.05 * k);
  const L21Report lin = lemma_l21_check(BallMap::linear(2.5, 8, 1.0), ladder);
  const L21Report fam = lemma_l21_check(BallMap::from_family(NonlinearityFamily::stability_default(c.a, c.b, c.delta), 8), ladder);
  auto count = [](const L21Report& r) {
    std::size_t n = 0;
    for (const auto& e : r.entries) n += (!e.skipped && e.sup_ok && e.ratio_ok) ? 1 : 0;
    return n;
  };
  const std::string name = "appendix.csv";
  auto csv = out.open(name);
  fmt::print(csv, "suite,trials,passed\n");
  fmt::print(csv, "gronwall,{},{}\n", g.trials, g.checked - g.violations);
  fmt::print(csv, "l8_enumeration,{},{}\n", l8.trials, l8.agreements);
  fmt::print(csv, "l21_linear,{},{}\n", lin.entries.size() - lin.skipped, count(lin));
  fmt::print(csv, "l21_family,{},{}\n", fam.entries.size() - fam.skipped, count(fam));
  out.close(csv, name);
  fmt::print(log, "gronwall: {} violations over {} sequence pairs, extremal gap {:.2e}\n", g.violations, g.trials,
             g.extremal_max_rel_gap);
  fmt::print(log, "l8 enumeration: {}/{} agree with the crossing oracle\n", l8.agreements, l8.trials);
  fmt::print(log, "l21 linear: {}/{} pass, family: {}/{} pass\n", count(lin), lin.entries.size() - lin.skipped,
             count(fam), fam.entries.size() - fam.skipped);
  const bool ok = g.violations == 0 && g.extremal_max_rel_gap <= 1e-12 && l8.agreements == l8.trials && lin.ok() &&
                  fam.ok();
  return ok ? kExitOk : kExitFailure;
}

}  // namespace detail

/// Runs one experiment, writing CSVs and summary.txt under output_dir and
/// mirroring the summary to `log`. Errors propagate as exceptions.
inline int run_experiment(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const detail::OutputDir out(config.output_dir);
  std::ostringstream summary;
  fmt::print(summary, "# experiment {}\n# fp_mode = ieee754-double, no fast-math\n", to_string(config.kind));
  summary << echo_config(config) << "\n# results\n";
  int status = kExitOk;
  switch (config.kind) {
    case ExperimentKind::fbm: status = detail::run_fbm(config, out, summary); break;
    case ExperimentKind::integrate: status = detail::run_integrate(config, out, summary); break;
    case ExperimentKind::solve: status = detail::run_solve(config, out, summary); break;
    case ExperimentKind::cocycle: status = detail::run_cocycle(config, out, summary); break;
    case ExperimentKind::stability: status = detail::run_stability(config, out, summary); break;
    case ExperimentKind::appendix: status = detail::run_appendix(config, out, summary); break;
  }
  fmt::print(summary, "exit_status = {}\n", status);
  const std::string name = "summary.txt";
  auto os = out.open(name);
  os << summary.str();
  out.close(os, name);
  log << summary.str();
  return status;
}

}  // namespace latticefbm
