#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "latticefbm/fbm_noise.hpp"
#include "latticefbm/young_integral.hpp"

using namespace latticefbm;

namespace {

const HolderConfig kHolder = HolderConfig::defaults_for_hurst(0.75);

SampledPath scalar(double t0, double step, std::size_t n, const std::function<double(double)>& f) {
  return SampledPath::from_function(TimeGrid{t0, step, n}, 1, [&](double t) { return Eigen::VectorXd::Constant(1, f(t)); });
}

// Riemann-Stieltjes integral of two piecewise-linear interpolants.
double trapezoid(const std::vector<double>& z, const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < z.size(); ++k) acc += 0.5 * (z[k] + z[k + 1]) * (w[k + 1] - w[k]);
  return acc;
}

NoisePath fbm(std::size_t nodes, double step, std::uint64_t seed, double hurst = 0.75) {
  NoiseConfig c;
  c.hurst = hurst;
  c.sigma = std::vector<double>(nodes, 1.0);
  c.horizon = 1.0;
  c.grid_step = step;
  c.seed = seed;
  return sample_noise(c);
}

}  // namespace

TEST(WeylDerivative, LinearClosedForms) {
  const SampledPath z = scalar(0.0, 1.0 / 64.0, 65, [](double t) { return t; });
  for (double alpha : {0.3, 0.45, 0.6}) {
    for (double r : {0.05, 0.3, 0.71, 0.99}) {
      // D^a_{0+} r = r^{1-a} / Gamma(2-a)
      EXPECT_NEAR(weyl_derivative_plus(z, alpha, 0.0, 1.0, r), std::pow(r, 1.0 - alpha) / std::tgamma(2.0 - alpha), 1e-12);
      // real-valued right derivative of order 1-a of w(q) = q: (1-r)^a / Gamma(1+a)
      EXPECT_NEAR(weyl_derivative_minus(z, alpha, 0.0, 1.0, r), std::pow(1.0 - r, alpha) / std::tgamma(1.0 + alpha), 1e-12);
    }
  }
  EXPECT_THROW(weyl_derivative_plus(z, 1.2, 0.0, 1.0, 0.5), DomainError);
  EXPECT_THROW(weyl_derivative_plus(z, 0.4, 0.0, 1.0, 1.0), DomainError);
}

TEST(FractionalQuadrature, MatchesPiecewiseLinearOracle) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> g;
  for (double alpha : {0.3, 0.46, 0.55}) {
    for (std::size_t cells : {1u, 2u, 7u, 64u, 300u}) {
      std::vector<double> z(cells + 1), w(cells + 1);
      z[0] = g(gen);
      w[0] = g(gen);
      for (std::size_t k = 1; k <= cells; ++k) {
        z[k] = z[k - 1] + g(gen);
        w[k] = w[k - 1] + g(gen);
      }
      const double ref = trapezoid(z, w);
      const double got = fractional_integral_scalar(z, w, 0.01, alpha);
      EXPECT_NEAR(got, ref, 1e-6 * (1.0 + std::abs(ref))) << alpha << ' ' << cells;
    }
  }
}

TEST(FractionalQuadrature, ConstantIntegrandGivesIncrement) {
  const std::vector<double> one(129, 1.0);
  std::vector<double> w(129);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::sin(0.1 * static_cast<double>(k));
  EXPECT_NEAR(fractional_integral_scalar(one, w, 1.0 / 128.0, 0.4), w.back() - w.front(), 1e-8);
}

TEST(Integrals, SmoothGoldenValues) {
  const double h = 1.0 / 1024.0;
  const SampledPath r = scalar(0.0, h, 1025, [](double t) { return t; });
  const SampledPath r2 = scalar(0.0, h, 1025, [](double t) { return t * t; });
  const SampledPath cosr = scalar(0.0, h, 1025, [](double t) { return std::cos(t); });
  EXPECT_NEAR(integral_fractional(DiagonalOperatorPath{r}, r, 0.0, 1.0, kHolder)(0), 0.5, 1e-6);
  // int_0^1 cos r d(r^2) = 2 (cos 1 + sin 1 - 1)
  const double gold = 2.0 * (std::cos(1.0) + std::sin(1.0) - 1.0);
  EXPECT_NEAR(integral_fractional(DiagonalOperatorPath{cosr}, r2, 0.0, 1.0, kHolder)(0), gold, 1e-6);
  // left-point sums are first order: int r dr - sum = h / 2
  EXPECT_NEAR(integral_young_sums(DiagonalOperatorPath{r}, r, 0.0, 1.0)(0), 0.5 - 0.5 * h, 1e-13);
}

TEST(Integrals, BackendsAgreeOnFbm) {
  const NoisePath noise = fbm(2, 1.0 / 1024.0, 3);
  const NoisePath other = fbm(2, 1.0 / 1024.0, 4);
  const SampledPath w = noise.window(0.0, 1.0);
  // integrand independent of the integrator, so both converge to the same limit
  const SampledPath z(0.0, w.step(), other.window(0.0, 1.0).values().array().cos().matrix());
  const Eigen::VectorXd a = integral_young_sums(DiagonalOperatorPath{z}, w, 0.0, 1.0);
  const Eigen::VectorXd b = integral_fractional(DiagonalOperatorPath{z}, w, 0.0, 1.0, kHolder);
  EXPECT_LE((a - b).norm() / b.norm(), 5e-3);
}

TEST(Integrals, DenseDiagonalConsistency) {
  const NoisePath noise = fbm(3, 1.0 / 128.0, 8);
  const SampledPath w = noise.window(0.0, 1.0);
  const SampledPath z(0.0, w.step(), w.values().array().sin().matrix());
  std::vector<Eigen::MatrixXd> mats;
  for (std::size_t k = 0; k < z.size(); ++k) mats.push_back(z.at_index(k).asDiagonal());
  const DenseOperatorPath dense(0.0, w.step(), mats);
  const DiagonalOperatorPath diag{z};
  EXPECT_LE((integral_fractional(dense, w, 0.25, 0.75, kHolder) - integral_fractional(diag, w, 0.25, 0.75, kHolder)).norm(), 1e-13);
  EXPECT_LE((integral_young_sums(dense, w, 0.0, 1.0) - integral_young_sums(diag, w, 0.0, 1.0)).norm(), 1e-14);
  // identity path integrates to the increment
  const DenseOperatorPath id = DenseOperatorPath::identity(w.grid(), 3);
  EXPECT_LE((integral_fractional(id, w, 0.0, 1.0, kHolder) - (w.at(1.0) - w.at(0.0))).norm(), 1e-8);
}

TEST(Integrals, EmptyIntervalAndErrors) {
  const NoisePath noise = fbm(1, 1.0 / 64.0, 1);
  const SampledPath w = noise.window(0.0, 1.0);
  EXPECT_EQ(integral_fractional(DiagonalOperatorPath{w}, w, 0.5, 0.5, kHolder).norm(), 0.0);
  HolderConfig bad = kHolder;
  bad.alpha = 0.2;
  try {
    integral_fractional(DiagonalOperatorPath{w}, w, 0.0, 1.0, bad);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("alpha must lie in (1 - beta_prime, beta)", 0), 0u);
  }
  EXPECT_THROW(integral_young_sums(DiagonalOperatorPath{w}, w, 0.0, 1.5), HorizonError);
}

TEST(Integrals, CalculusIdentities) {
  const NoisePath n1 = fbm(2, 1.0 / 256.0, 5), n2 = fbm(2, 1.0 / 256.0, 6);
  const SampledPath w = n1.window(0.0, 1.0), w2 = n2.window(0.0, 1.0);
  const SampledPath z(0.0, w.step(), w.values().array().cos().matrix());
  const SampledPath z2(0.0, w.step(), w2.values().array().sin().matrix());
  const CalculusReport r = verify_integral_calculus(z, z2, w, w2, 0.0, 0.5, 1.0, kHolder);
  EXPECT_LE(r.sums.max(), 1e-13);
  EXPECT_LE(r.fractional.max(), 1e-4);
}

TEST(Integrals, ShiftedPathsKeepTheIntegral) {
  const NoisePath n1 = fbm(1, 1.0 / 128.0, 2);
  const SampledPath w = n1.samples();
  const SampledPath sw = shift_path(w, 0.25);
  EXPECT_DOUBLE_EQ(sw.t_start(), w.t_start() - 0.25);
  EXPECT_EQ(sw.at(0.0).norm(), 0.0);
  const SampledPath tz = translate_path(w, 0.25);
  EXPECT_EQ((tz.at(0.0) - w.at(0.25)).norm(), 0.0);
}

TEST(YoungBound, EmpiricalConstantIsFinite) {
  const NoisePath n1 = fbm(2, 1.0 / 256.0, 9);
  const SampledPath w = n1.window(0.0, 1.0);
  const SampledPath z(0.0, w.step(), w.values().array().cos().matrix());
  for (auto backend : {IntegralBackend::young_sums, IntegralBackend::fractional}) {
    const YoungBoundReport r = verify_young_bound(z, w, kHolder, 200, 1, backend);
    EXPECT_GT(r.evaluated, 0u);
    EXPECT_GT(r.empirical_constant, 0.0);
    EXPECT_LT(r.empirical_constant, 10.0);
  }
}
