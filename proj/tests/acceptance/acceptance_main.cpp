// Acceptance gate: one PASS/FAIL line per criterion.
// Usage: acceptance [--criterion N]   (all criteria when N is omitted)
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "latticefbm/fbm_noise.hpp"
#include "latticefbm/holder_spaces.hpp"
#include "latticefbm/lattice_ops.hpp"
#include "latticefbm/mild_solver.hpp"
#include "latticefbm/stability_lab.hpp"
#include "latticefbm/young_integral.hpp"

using namespace latticefbm;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok  " : "BAD ") + what);
  }
  void info(const std::string& what) { notes.push_back("    " + what); }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

NoisePath sample(double hurst, std::vector<double> sigma, double horizon, double step, std::uint64_t seed) {
  NoiseConfig c;
  c.hurst = hurst;
  c.sigma = std::move(sigma);
  c.horizon = horizon;
  c.grid_step = step;
  c.seed = seed;
  return sample_noise(c);
}

double sup_distance(const SampledPath& a, const SampledPath& b) {
  return (a.values() - b.values()).rowwise().norm().maxCoeff();
}

// 1. fBm law
Outcome ac1() {
  Outcome out;
  const std::vector<double> sigma{1.0, 0.5};
  const double s2 = 1.25;
  const std::pair<double, double> pairs[] = {{0.25, 0.5}, {0.5, 1.0},  {1.0, 1.0},
                                             {-0.5, 0.5}, {-1.0, 0.25}, {0.125, 0.875}};
  const int n = 10000;
  for (double H : {0.6, 0.75, 0.9}) {
    std::vector<std::vector<double>> prod(6), incr(6);
    for (int k = 0; k < n; ++k) {
      const NoisePath w = sample(H, sigma, 1.0, 1.0 / 64.0, derive_stream_seed(2024, static_cast<std::uint64_t>(k)));
      for (int p = 0; p < 6; ++p) {
        const Eigen::VectorXd bs = w.samples().at(pairs[p].first), bt = w.samples().at(pairs[p].second);
        prod[p].push_back(bs.dot(bt));
        incr[p].push_back((bt - bs).squaredNorm());
      }
    }
    int n_cov = 0, n_inc = 0;
    double zc = 0.0, zi = 0.0;
    for (int p = 0; p < 6; ++p) {
      auto z_score = [n](const std::vector<double>& v, double target) {
        double m = 0.0, q = 0.0;
        for (double x : v) m += x;
        m /= n;
        for (double x : v) q += (x - m) * (x - m);
        const double se = std::sqrt(q / (n - 1) / n);
        return se > 0.0 ? std::abs(m - target) / se : (m == target ? 0.0 : INFINITY);
      };
      const auto [s, t] = pairs[p];
      const double c = z_score(prod[p], s2 * fbm_covariance(H, s, t));
      const double i = z_score(incr[p], s2 * std::pow(std::abs(t - s), 2.0 * H));
      zc = std::max(zc, c);
      zi = std::max(zi, i);
      n_cov += c > 3.0;
      n_inc += i > 3.0;
    }
    out.check(n_cov == 0, fmt("H=%.2f covariance: max |z| = %.2f over 6 pairs", H, zc));
    out.check(n_inc == 0, fmt("H=%.2f increment identity: max |z| = %.2f over 6 pairs", H, zi));
  }
  return out;
}

// 2. integration backends
Outcome ac2() {
  Outcome out;
  const HolderConfig hc = HolderConfig::defaults_for_hurst(0.75);
  const double h = std::ldexp(1.0, -12);
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const NoisePath w = sample(0.75, {1.0, 1.0}, 1.0, h, seed);
    const NoisePath v = sample(0.75, {1.0, 1.0}, 1.0, h, derive_stream_seed(seed, 99));
    const SampledPath wp = w.window(0.0, 1.0);
    const SampledPath z(0.0, h, v.window(0.0, 1.0).values().array().cos().matrix());
    const Eigen::VectorXd a = integral_young_sums(DiagonalOperatorPath{z}, wp, 0.0, 1.0);
    const Eigen::VectorXd b = integral_fractional(DiagonalOperatorPath{z}, wp, 0.0, 1.0, hc);
    worst = std::max(worst, (a - b).norm() / b.norm());
  }
  out.check(worst <= 1e-3, fmt("fBm inputs at dt=2^-12: max relative backend gap %.3e (<= 1e-3)", worst));

  const std::size_t pts = 4097;
  auto path = [&](auto f) {
    return SampledPath::from_function(TimeGrid{0.0, h, pts}, 1, [&](double t) { return Eigen::VectorXd::Constant(1, f(t)); });
  };
  const SampledPath r = path([](double t) { return t; }), r2 = path([](double t) { return t * t; });
  const SampledPath cr = path([](double t) { return std::cos(t); });
  const SampledPath er = path([](double t) { return std::exp(t); });
  const double g1 = integral_fractional(DiagonalOperatorPath{r}, r, 0.0, 1.0, hc)(0);
  const double g2 = integral_fractional(DiagonalOperatorPath{cr}, r2, 0.0, 1.0, hc)(0);
  const double g3 = integral_fractional(DiagonalOperatorPath{er}, er, 0.0, 1.0, hc)(0);
  const double e1 = std::abs(g1 - 0.5);
  const double e2 = std::abs(g2 - 2.0 * (std::cos(1.0) + std::sin(1.0) - 1.0));
  const double e3 = std::abs(g3 - 0.5 * (std::exp(2.0) - 1.0));
  out.check(std::max({e1, e2, e3}) <= 1e-6,
            fmt("golden values int r dr, int cos d(r^2), int e^r d(e^r): errors %.1e %.1e %.1e (<= 1e-6)", e1, e2, e3));
  const double s1 = std::abs(integral_young_sums(DiagonalOperatorPath{r}, r, 0.0, 1.0)(0) - 0.5);
  out.info(fmt("left-point sums on int r dr: error %.2e (first order, h/2 = %.2e)", s1, h / 2));

  const NoisePath w = sample(0.75, {1.0, 0.7}, 1.0, h, 11), w2 = sample(0.75, {1.0, 0.7}, 1.0, h, 12);
  const SampledPath wp = w.window(0.0, 1.0), wp2 = w2.window(0.0, 1.0);
  const SampledPath z(0.0, h, wp2.values().array().cos().matrix());
  const SampledPath z2(0.0, h, (wp.values().array() + 0.3).sin().matrix());
  const CalculusReport cr2 = verify_integral_calculus(z, z2, wp, wp2, 0.0, 0.375, 1.0, hc);
  out.check(cr2.fractional.max() <= 1e-4,
            fmt("fractional calculus identities: linear %.1e/%.1e additive %.1e shift %.1e (<= 1e-4)",
                cr2.fractional.linear_z, cr2.fractional.linear_omega, cr2.fractional.additivity, cr2.fractional.shift));
  out.check(cr2.sums.max() <= 1e-12, fmt("sums calculus identities: max residual %.1e (rounding, <= 1e-12)", cr2.sums.max()));
  return out;
}

// 3. k(rho)
// Gate exponents a = -0.6, b = -0.3; the model-derived pair at H = 0.75 is
// reported alongside. Small-L behaviour gives k(rho) ~ rho^{-(a+b+1)}.
Outcome ac3() {
  Outcome out;
  auto ladder = [](double a, double b) {
    std::vector<double> ks;
    for (double rho : {0.0, 1.0, 10.0, 100.0}) ks.push_back(k_rho(rho, a, b, 1.0));
    return ks;
  };
  const double a = -0.6, b = -0.3;
  const std::vector<double> ks = ladder(a, b);
  bool mono = true;
  for (std::size_t i = 1; i < ks.size(); ++i) mono = mono && ks[i] <= ks[i - 1];
  out.check(mono, fmt("k nonincreasing on rho = 0, 1, 10, 100: %.8f %.8f %.8f %.8f", ks[0], ks[1], ks[2], ks[3]));
  out.check(ks[3] < 0.05 * ks[0], fmt("k(100)/k(0) = %.4f (< 0.05)", ks[3] / ks[0]));
  const double beta_fn = std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 2.0);
  out.check(std::abs(ks[0] - beta_fn) <= 1e-6, fmt("k(0) - B(a+1,b+1) = %.2e (<= 1e-6)", ks[0] - beta_fn));
  const HolderConfig hc = HolderConfig::defaults_for_hurst(0.75);
  const double ma = -hc.alpha, mb = hc.alpha + hc.beta_prime - hc.beta - 1.0;
  const std::vector<double> km = ladder(ma, mb);
  out.info(fmt("model exponents a = %.4f, b = %.4f: k = %.6f %.6f %.6f %.6f, k(100)/k(0) = %.4f", ma, mb, km[0], km[1],
               km[2], km[3], km[3] / km[0]));
  out.info(fmt("rho needed for a 0.05 ratio at a+b+1 = %.2f: about %.0e", a + b + 1.0, std::pow(20.0, 1.0 / (a + b + 1.0))));
  return out;
}

// 4. semigroup suite
Outcome ac4() {
  Outcome out;
  std::mt19937_64 gen(44);
  std::uniform_real_distribution<double> unif;
  std::normal_distribution<double> g;
  const std::vector<double> times{0.0, 0.005, 0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0};
  std::size_t bad_models = 0, checks = 0;
  double law = 0.0, coercive_margin = INFINITY;
  for (int trial = 0; trial < 20; ++trial) {
    LatticeModel m;
    m.nu = 0.05 + 3.0 * unif(gen);
    m.lambda = 0.05 + 3.0 * unif(gen);
    m.window = 3 + static_cast<std::size_t>(unif(gen) * 38.0);
    m.boundary = trial % 2 ? Boundary::periodic : Boundary::zero_padded;
    const SemigroupBoundsReport r = verify_semigroup_bounds(m, times, 0.6);
    bad_models += r.ok() ? 0 : 1;
    checks += r.checks;
    const Semigroup sg(m);
    Eigen::VectorXd u(static_cast<Eigen::Index>(m.window));
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = g(gen);
    for (auto [t, s] : {std::pair{0.1, 0.2}, std::pair{0.5, 1.5}, std::pair{1.0, 1.0}}) {
      law = std::max(law, (sg.apply(t, sg.apply(s, u)) - sg.apply(t + s, u)).norm() / u.norm());
      law = std::max(law, (sg.matrix(t) * sg.matrix(s) - sg.matrix(t + s)).norm());
    }
    for (int k = 0; k < 50; ++k) {
      for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = g(gen);
      coercive_margin = std::min(coercive_margin, u.dot(apply_A_lambda(m, u)) / (m.lambda * u.squaredNorm()));
    }
  }
  out.check(bad_models == 0, fmt("four semigroup bounds on 20 random (nu, lambda, N): %zu violating models, %zu checks",
                                 bad_models, checks));
  out.check(law <= 1e-12, fmt("semigroup law max error %.2e (<= 1e-12)", law));
  out.check(coercive_margin >= 1.0 - 1e-12,
            fmt("<A_lambda u, u> / (lambda |u|^2) >= %.6f over 1000 vectors (>= 1)", coercive_margin));
  return out;
}

// 5. nonlinearity suite
Outcome ac5() {
  Outcome out;
  std::mt19937_64 gen(55);
  std::normal_distribution<double> g;
  auto randn = [&](std::size_t n, double s) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = s * g(gen);
    return v;
  };
  for (const auto& fam : {NonlinearityFamily::generic_default(0.5, 0.5), NonlinearityFamily::stability_default(0.5, 0.5)}) {
    LatticeModel m;
    m.window = 8;
    m.family = fam;
    std::vector<Quadruple> quads;
    std::size_t lip_f = 0;
    for (int k = 0; k < 10000; ++k) {
      const double s = (k % 3 == 0) ? 0.01 : 1.5;
      const Eigen::VectorXd u = randn(8, 1.5);
      quads.push_back({u, u + randn(8, s), u + randn(8, s), u + randn(8, 2 * s)});
      const Eigen::VectorXd v = randn(8, 1.5);
      if ((nonlinearity_f(m, u) - nonlinearity_f(m, v)).norm() > fam.D_f * (u - v).norm() + 1e-14) ++lip_f;
    }
    const HPropertiesReport r = verify_h_properties(m, quads);
    out.check(r.ok() && lip_f == 0,
              fmt("%s: (MN) %zu, h-Lipschitz %zu, |Dh|<=D_h %zu, f-Lipschitz %zu violations over 10^4 tuples (worst MN ratio %.3f)",
                  fam.name.c_str(), r.mn_violations, r.lipschitz_violations, r.derivative_violations, lip_f, r.worst_mn_ratio));
    double frechet = 0.0, fd = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Eigen::VectorXd u = randn(8, 1.5), d = randn(8, 1e-2);
      const Eigen::VectorXd rem = nonlinearity_h(m, u + d) - nonlinearity_h(m, u) - derivative_h(m, u).cwiseProduct(d);
      frechet = std::max(frechet, rem.norm() / (0.5 * fam.M_h * d.squaredNorm()));
      for (Eigen::Index i = 0; i < 8; ++i) {
        Eigen::VectorXd up = u, um = u;
        up(i) += 1e-5;
        um(i) -= 1e-5;
        fd = std::max(fd, std::abs((nonlinearity_h(m, up)(i) - nonlinearity_h(m, um)(i)) / 2e-5 - derivative_h(m, u)(i)));
        fd = std::max(fd, std::abs((nonlinearity_f(m, up)(i) - nonlinearity_f(m, um)(i)) / 2e-5 - derivative_f(m, u)(i)));
      }
    }
    out.check(frechet <= 1.0 + 1e-9, fmt("%s: Frechet remainder / (M_h |v|^2 / 2) <= %.4f", fam.name.c_str(), frechet));
    out.check(fd <= 1e-6, fmt("%s: finite-difference Df, Dh max error %.2e (<= 1e-6)", fam.name.c_str(), fd));
  }
  return out;
}

// 6. mild solver
Outcome ac6() {
  Outcome out;
  LatticeModel m;
  m.window = 64;
  SolverConfig cfg;
  cfg.grid_step = std::ldexp(1.0, -10);
  const std::vector<int> levels{6, 7, 8};
  std::vector<double> err2(levels.size(), 0.0);
  double worst_factor = 0.0, worst_res = 0.0, worst_coc = 0.0;
  bool ball = true, conv = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    NoiseConfig nc;
    nc.sigma = NoiseConfig::default_sigma(64, 0.5);
    nc.horizon = 1.0;
    nc.grid_step = cfg.grid_step;
    nc.seed = seed;
    const NoisePath w = sample_noise(nc);
    Eigen::VectorXd x(64);
    for (Eigen::Index i = 0; i < 64; ++i) x(i) = std::sin(0.3 * static_cast<double>(i) + static_cast<double>(seed));
    const MildSolution s = picard_solve(x, w, m, cfg);
    conv = conv && s.converged;
    for (double f : s.contraction_factors) worst_factor = std::max(worst_factor, f);
    worst_res = std::max(worst_res, s.residual);
    ball = ball && s.ball_ok;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const double step = std::ldexp(1.0, -levels[l]);
      const SampledPath e = euler_solve(x, w.samples(), m, 1.0, step);
      const SampledPath ref = s.path.subsample(static_cast<std::size_t>(std::llround(step / cfg.grid_step)));
      const double d = sup_distance(e, ref);
      err2[l] += d * d / 10.0;
    }
    worst_coc = std::max(worst_coc, verify_cocycle(x, w, m, cfg, 0.5, 0.5).final_discrepancy);
  }
  out.check(conv && worst_factor < 0.5, fmt("contraction factors after rho auto-tune: max %.4f over 10 problems (< 1/2)", worst_factor));
  out.check(worst_res <= 1e-6, fmt("fixed-point residual max %.2e (<= 1e-6)", worst_res));
  out.check(ball, "ball invariance with radius 2(1+|A|T^{1-beta})|x|+1 on all iterates");
  bool shrink = true;
  std::string ratios;
  for (std::size_t l = 1; l < levels.size(); ++l) {
    const double q = std::sqrt(err2[l - 1] / err2[l]);
    shrink = shrink && q >= 1.4;
    ratios += fmt(" %.3f", q);
  }
  out.check(shrink, "Euler vs Picard(2^-10) RMS error ratios per doubling from 2^-6:" + ratios + " (>= 1.4)");
  out.check(worst_coc <= 1e-2, fmt("cocycle discrepancy at t=tau=0.5: max %.2e (<= 1e-2)", worst_coc));
  return out;
}

// 7. stability certificate
Outcome ac7() {
  Outcome out;
  const double hurst = 0.75;
  LatticeModel m;
  m.window = 64;
  m.lambda = 1.0;
  m.family = NonlinearityFamily::stability_default(0.5, 0.5);
  SolverConfig cfg;
  cfg.grid_step = std::ldexp(1.0, -8);
  StabilityConfig st;
  st.eps_hat = 0.2;
  st.mu = 0.5;
  st.n_max = 20;
  st.C = calibrated_constant(hurst, cfg.holder, m, cfg.grid_step);
  const double target = certified_rate(m.lambda, st.eps_hat);
  out.info(fmt("C = %.4f, envelope exponent lambda - log(1 + 0.2e) = %.10f", st.C, target));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    NoiseConfig nc;
    nc.hurst = hurst;
    nc.sigma = NoiseConfig::default_sigma(64, 0.5);
    nc.horizon = 21.0;
    nc.grid_step = cfg.grid_step;
    nc.seed = seed;
    const NoisePath w = sample_noise(nc);
    const std::vector<double> prof = NoiseConfig::default_sigma(64, 1.0);
    const Eigen::VectorXd x = initial_from_neighborhood(w, st, m, cfg.holder, Eigen::Map<const Eigen::VectorXd>(prof.data(), 64));
    const StabilityReport r = concatenated_solve(x, w, st, m, cfg);
    out.check(!r.any_cutoff_active(), fmt("seed %llu (i) cut-off never active (|x| = %.3e)", static_cast<unsigned long long>(seed), r.x_norm));
    double env = 0.0;
    for (std::size_t n = 0; n < r.norm_beta.size(); ++n) env = std::max(env, r.norm_beta[n] / r.gronwall[n]);
    out.check(r.envelope_holds, fmt("seed %llu (ii) max |u^n|_beta / envelope = %.4f", static_cast<unsigned long long>(seed), env));
    out.check(r.fit.status == FitStatus::ok && r.fit.rate >= st.mu,
              fmt("seed %llu (iii) fitted decay rate %.4f (>= 0.5, r^2 = %.4f)", static_cast<unsigned long long>(seed), r.fit.rate, r.fit.r2));
    SolverConfig direct = cfg;
    direct.horizon = 20.0;
    const MildSolution d = picard_solve(x, w, m, direct);
    const double gap = sup_distance(d.path, r.path) / d.path.values().rowwise().norm().maxCoeff();
    out.check(d.converged && gap <= 1e-4, fmt("seed %llu (iv) concatenated vs direct solve: relative sup gap %.2e (<= 1e-4), verdict %s",
                                             static_cast<unsigned long long>(seed), gap, r.certified ? "certified" : "not certified"));
  }
  return out;
}

// 8. appendix suite
Outcome ac8() {
  Outcome out;
  const GronwallSuiteReport g = gronwall_suite(1000, 88);
  out.check(g.violations == 0, fmt("Gronwall: %zu violations over %zu checks of 1000 random sequences", g.violations, g.checked));
  out.check(g.extremal_max_rel_gap <= 1e-12, fmt("Gronwall extremal case attains the bound: max relative gap %.1e", g.extremal_max_rel_gap));
  std::vector<double> ladder;
  for (int k = 0; k <= 40; ++k) ladder.push_back(0.025 * k);
  const L21Report fam = lemma_l21_check(BallMap::from_family(NonlinearityFamily::stability_default(0.5, 0.5, 1.0), 8), ladder);
  const L21Report lin = lemma_l21_check(BallMap::linear(2.5, 8, 1.0), ladder);
  auto passed = [](const L21Report& r) {
    std::size_t n = 0;
    for (const auto& e : r.entries) n += !e.skipped && e.sup_ok && e.ratio_ok;
    return n;
  };
  out.check(fam.ok(), fmt("ball-radius lemma, built-in family: %zu/%zu ladder points pass both inequalities",
                          passed(fam), fam.entries.size() - fam.skipped));
  out.check(lin.ok(), fmt("ball-radius lemma, linear map: %zu/%zu pass", passed(lin), lin.entries.size() - lin.skipped));
  const L8SuiteReport l8 = lemma_l8_suite(1000, 8);
  out.check(l8.agreements == l8.trials && l8.holds_when_eps_below_mu == l8.eps_below_mu,
            fmt("sequence lemma enumeration: %zu/%zu agree with the crossing oracle, %zu/%zu hold for eps < mu",
                l8.agreements, l8.trials, l8.holds_when_eps_below_mu, l8.eps_below_mu));
  return out;
}

// 9. temperedness
Outcome ac9() {
  Outcome out;
  const double bp = HolderConfig::defaults_for_hurst(0.75).beta_prime;
  NoiseConfig base;
  base.sigma = {1.0};
  base.horizon = 65.0;
  base.grid_step = std::ldexp(1.0, -6);
  auto fbm = [&](std::uint64_t seed) {
    NoiseConfig c = base;
    c.seed = seed;
    return sample_noise(c);
  };
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 200; ++s) seeds.push_back(derive_stream_seed(909, s));
  const TemperednessReport t = temperedness_diagnostic(fbm, seeds, 64, bp);
  out.check(t.ci_contains_zero, fmt("fBm, 200 seeds, n_max=64: slope %.2e, 95%% CI [%.2e, %.2e] contains 0", t.slope, t.ci_low, t.ci_high));
  out.info(fmt("mean log+|||theta_n w|||/n at n=1, 16, 64: %.4f %.4f %.4f", t.mean_statistic[1], t.mean_statistic[16], t.mean_statistic[64]));
  auto blowup = [&](std::uint64_t) {
    return make_synthetic_noise(base, -65.0, 65.0, [](double s) { return Eigen::VectorXd::Constant(1, std::exp(0.8 * s)); });
  };
  const TemperednessReport e = temperedness_diagnostic(blowup, {0}, 64, bp);
  out.check(!e.ci_contains_zero, fmt("injected e^{0.8 t}: slope %.4f, CI [%.4f, %.4f] excludes 0 (flagged)", e.slope, e.ci_low, e.ci_high));
  return out;
}

const char* kTitles[] = {"",
                         "fBm law",
                         "integration backends",
                         "k(rho) behavior",
                         "semigroup suite",
                         "nonlinearity suite",
                         "mild solver",
                         "stability certificate",
                         "appendix suite",
                         "temperedness diagnostic"};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::function<Outcome()> runs[] = {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9};
  bool all = true;
  for (int c = 1; c <= 9; ++c) {
    if (only != 0 && c != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = runs[c - 1]();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& n : o.notes) std::printf("  AC%d %s\n", c, n.c_str());
    std::printf("AC%d %s: %s (%.1f s)\n", c, o.pass ? "PASS" : "FAIL", kTitles[c], secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
