#pragma once

#include <charconv>
#include <cstring>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "latticefbm/error.hpp"
#include "latticefbm/holder_spaces.hpp"
#include "latticefbm/sampled_path.hpp"

namespace latticefbm {

struct NoiseConfig {
  double hurst = 0.75;
  std::vector<double> sigma{1.0};
  double horizon = 1.0;  // paths cover [-horizon, horizon]
  double grid_step = 1.0 / 1024.0;
  std::uint64_t seed = 0;

  std::size_t nodes() const { return sigma.size(); }

  void validate() const {
    require(hurst > 0.5 && hurst < 1.0, "hurst must lie in (0.5,1)");
    require(!sigma.empty(), "noise needs at least one node");
    bool any = false;
    for (double s : sigma) {
      require(std::isfinite(s), "sigma entries must be finite");
      any = any || s != 0.0;
    }
    require(any, "at least one sigma_i must be nonzero");
    require(grid_step > 0.0 && std::isfinite(grid_step), "grid_step must be positive");
    require(horizon > 0.0 && std::isfinite(horizon), "horizon must be positive");
    const double cells = horizon / grid_step;
    require(std::abs(cells - std::round(cells)) <= 1e-12 * std::max(1.0, cells),
            "horizon must be an integer multiple of grid_step");
  }

  /// sigma_i = s0 * 2^{-|i - N/2| / 2}, peaked at the window center.
  static std::vector<double> default_sigma(std::size_t n, double s0) {
    std::vector<double> s(n);
    const auto c = static_cast<double>(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = s0 * std::pow(2.0, -std::abs(static_cast<double>(i) - c) / 2.0);
    }
    return s;
  }
};

/// Two-sided l2-valued noise sample. The time window contains 0 as a grid
/// point and the value there is exactly zero.
class NoisePath {
 public:
  NoisePath(NoiseConfig config, SampledPath samples, bool used_cholesky = false)
      : config_(std::move(config)), samples_(std::move(samples)), used_cholesky_(used_cholesky) {
    origin_ = samples_.index_of(0.0);
    require(samples_.at_index(origin_).isZero(0.0), "noise value at t = 0 must be zero");
  }

  const NoiseConfig& config() const { return config_; }
  const SampledPath& samples() const { return samples_; }
  std::size_t origin_index() const { return origin_; }
  bool used_cholesky() const { return used_cholesky_; }
  std::size_t nodes() const { return samples_.nodes(); }
  double step() const { return samples_.step(); }
  double t_min() const { return samples_.t_start(); }
  double t_max() const { return samples_.t_end(); }

  /// Restriction to [a, b]; HorizonError outside the sampled window.
  SampledPath window(double a, double b) const { return samples_.window(a, b); }

 private:
  NoiseConfig config_;
  SampledPath samples_;
  std::size_t origin_ = 0;
  bool used_cholesky_ = false;
};

/// R(s, t) = (|s|^{2H} + |t|^{2H} - |t - s|^{2H}) / 2.
inline double fbm_covariance(double hurst, double s, double t) {
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(s), h2) + std::pow(std::abs(t), h2) -
                std::pow(std::abs(t - s), h2));
}

/// splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Streams are addressed by index, so
/// adding nodes leaves earlier streams untouched.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

enum class FbmMethod { circulant, cholesky };

struct ScalarFbm {
  std::vector<double> values;  // one per grid point, zero at t = 0
  bool used_cholesky = false;
};

namespace detail {

/// Autocovariance of unit-step fractional Gaussian noise scaled to step h.
inline double fgn_autocov(double hurst, double h, std::size_t k) {
  const double h2 = 2.0 * hurst;
  const double kd = static_cast<double>(k);
  const double v = std::pow(kd + 1.0, h2) - 2.0 * std::pow(kd, h2) + std::pow(std::abs(kd - 1.0), h2);
  return 0.5 * std::pow(h, h2) * v;
}

inline std::vector<double> fgn_cholesky(double hurst, double h, std::size_t n, std::mt19937_64& gen) {
  Eigen::MatrixXd cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          fgn_autocov(hurst, h, i > j ? i - j : j - i);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  require(llt.info() == Eigen::Success, "fGn covariance is not positive definite");
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(gen);
  Eigen::VectorXd x = llt.matrixL() * z;
  return std::vector<double>(x.data(), x.data() + x.size());
}

/// Davies-Harte: embed the n x n Toeplitz covariance in a circulant of size
/// 2n. Returns an empty vector when the embedding has a negative eigenvalue.
inline std::vector<double> fgn_circulant(double hurst, double h, std::size_t n, std::mt19937_64& gen) {
  const std::size_t m = 2 * n;
  std::vector<double> c(m);
  for (std::size_t k = 0; k <= n; ++k) c[k] = fgn_autocov(hurst, h, k);
  for (std::size_t k = n + 1; k < m; ++k) c[k] = c[m - k];

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> lam;
  fft.fwd(lam, c);
  double scale = 0.0;
  for (const auto& l : lam) scale = std::max(scale, std::abs(l.real()));
  std::vector<std::complex<double>> w(m);
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < m; ++k) {
    double ev = lam[k].real();
    if (ev < -1e-10 * scale) return {};
    ev = std::max(ev, 0.0);
    const double a = std::sqrt(ev / static_cast<double>(m));
    const double xi = normal(gen);
    const double eta = normal(gen);
    w[k] = {a * xi, a * eta};
  }
  std::vector<std::complex<double>> y;
  fft.fwd(y, w);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = y[k].real();
  return out;
}

}  // namespace detail

/// One fBm realization on a uniform grid containing t = 0. Increments have
/// exactly the covariance implied by R(s, t). The circulant embedding is
/// used unless it fails (or Cholesky is requested), in which case the
/// Cholesky factor of the increment covariance is used and flagged.
inline ScalarFbm sample_fbm_1d(double hurst, const TimeGrid& grid, std::uint64_t seed,
                               FbmMethod method = FbmMethod::circulant) {
  require(hurst > 0.5 && hurst < 1.0, "hurst must lie in (0.5,1)");
  require(grid.count >= 2, "grid needs at least 2 points");
  require(grid.step > 0.0, "grid step must be positive");
  const double o = -grid.t_start / grid.step;
  const double oi = std::round(o);
  require(oi >= 0.0 && oi <= static_cast<double>(grid.count - 1) &&
              std::abs(o - oi) <= 1e-9 * std::max(1.0, std::abs(o)),
          "grid must contain t = 0 as a grid point");
  const auto origin = static_cast<std::size_t>(oi);

  std::mt19937_64 gen(seed);
  const std::size_t n = grid.count - 1;
  ScalarFbm out;
  std::vector<double> inc;
  if (method == FbmMethod::circulant) inc = detail::fgn_circulant(hurst, grid.step, n, gen);
  if (inc.empty()) {
    out.used_cholesky = true;
    inc = detail::fgn_cholesky(hurst, grid.step, n, gen);
  }
  out.values.assign(grid.count, 0.0);
  for (std::size_t k = 0; k < n; ++k) out.values[k + 1] = out.values[k] + inc[k];
  const double base = out.values[origin];
  for (double& v : out.values) v -= base;
  out.values[origin] = 0.0;
  return out;
}

/// Explicit-time overload. Rejects grids that are not uniform.
inline ScalarFbm sample_fbm_1d(double hurst, std::span<const double> times, std::uint64_t seed,
                               FbmMethod method = FbmMethod::circulant) {
  require(times.size() >= 2, "grid needs at least 2 points");
  const double h = times[1] - times[0];
  require(h > 0.0, "grid must be increasing");
  for (std::size_t k = 1; k < times.size(); ++k) {
    require(std::abs((times[k] - times[k - 1]) - h) <= 1e-9 * h, "grid must be uniform");
  }
  return sample_fbm_1d(hurst, TimeGrid{times[0], h, times.size()}, seed, method);
}

/// N independent fBm paths over [-horizon, horizon] from a single two-sided
/// embedding each, scaled by sigma_i. Node i uses stream i of the master seed.
inline NoisePath sample_noise(const NoiseConfig& config, FbmMethod method = FbmMethod::circulant) {
  config.validate();
  const auto cells = static_cast<std::size_t>(std::llround(config.horizon / config.grid_step));
  const TimeGrid grid{-static_cast<double>(cells) * config.grid_step, config.grid_step, 2 * cells + 1};
  RowMatrix v = RowMatrix::Zero(static_cast<Eigen::Index>(grid.count),
                                static_cast<Eigen::Index>(config.nodes()));
  bool chol = false;
  for (std::size_t i = 0; i < config.nodes(); ++i) {
    if (config.sigma[i] == 0.0) continue;
    const ScalarFbm b = sample_fbm_1d(config.hurst, grid, derive_stream_seed(config.seed, i), method);
    chol = chol || b.used_cholesky;
    for (std::size_t k = 0; k < grid.count; ++k) {
      v(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = config.sigma[i] * b.values[k];
    }
  }
  return NoisePath(config, SampledPath(grid.t_start, grid.step, std::move(v)), chol);
}

/// Deterministic noise w(t) given node-wise by fn(t) - fn(0) on [t_min, t_max].
/// Used to inject synthetic drivers (linear, constant, exponential).
inline NoisePath make_synthetic_noise(const NoiseConfig& config, double t_min, double t_max,
                                      const std::function<Eigen::VectorXd(double)>& fn) {
  const TimeGrid grid = TimeGrid::covering(t_min, t_max, config.grid_step);
  const Eigen::VectorXd base = fn(0.0);
  SampledPath p = SampledPath::from_function(grid, config.nodes(), [&](double t) {
    Eigen::VectorXd v = fn(t) - base;
    return v;
  });
  RowMatrix vals = p.values();
  vals.row(static_cast<Eigen::Index>(p.index_of(0.0))).setZero();
  return NoisePath(config, SampledPath(p.t_start(), p.step(), std::move(vals)));
}

/// theta_tau w (t) = w(t + tau) - w(tau) on [t_min - tau, t_max - tau].
inline NoisePath wiener_shift(const NoisePath& path, double tau) {
  const SampledPath& s = path.samples();
  if (tau < s.t_start() - 1e-9 * s.step() || tau > s.t_end() + 1e-9 * s.step()) {
    throw HorizonError("shift " + std::to_string(tau) + " leaves the sampled window");
  }
  const std::size_t k = s.index_of(tau);
  RowMatrix v = s.values().rowwise() - s.values().row(static_cast<Eigen::Index>(k));
  v.row(static_cast<Eigen::Index>(k)).setZero();
  // integer offsets keep t = 0 exactly on the grid
  const double t_start = -static_cast<double>(k) * s.step();
  NoiseConfig cfg = path.config();
  return NoisePath(std::move(cfg), SampledPath(t_start, s.step(), std::move(v)), path.used_cholesky());
}

/// Grid supremum of ||w(t) - w(s)|| / (t - s)^beta_prime over [a, b]. This is
/// a lower bound for the seminorm of the underlying continuous path.
inline double estimate_holder_seminorm_path(const NoisePath& path, double beta_prime, double a, double b) {
  require(beta_prime > 0.0 && beta_prime < path.config().hurst, "beta_prime must be below hurst");
  const SampledPath w = path.window(a, b);
  return holder_seminorm_weighted(w, beta_prime, 0.0);
}

namespace detail {
inline void append_double(std::string& out, double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, r.ptr);
}
inline std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = digits[x & 0xF];
  return s;
}
}  // namespace detail

/// FNV-1a digest over the bit patterns of sigma.
inline std::string sigma_digest(const std::vector<double>& sigma) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double s : sigma) {
    std::uint64_t bits;
    std::memcpy(&bits, &s, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  }
  return detail::hex64(h);
}

/// Writes a sampled path as CSV: t,node_0,...,node_{N-1}.
inline void write_path_csv(std::ostream& os, const SampledPath& p) {
  std::string line = "t";
  for (std::size_t i = 0; i < p.nodes(); ++i) line += ",node_" + std::to_string(i);
  os << line << '\n';
  for (std::size_t k = 0; k < p.size(); ++k) {
    line.clear();
    detail::append_double(line, p.time(k));
    for (std::size_t i = 0; i < p.nodes(); ++i) {
      line.push_back(',');
      detail::append_double(line, p(k, i));
    }
    os << line << '\n';
  }
}

/// Noise CSV: a "# hurst=.. sigma_digest=.. seed=.." line, then the path.
inline void write_noise_csv(std::ostream& os, const NoisePath& path) {
  std::string head = "# hurst=";
  detail::append_double(head, path.config().hurst);
  head += " sigma_digest=" + sigma_digest(path.config().sigma);
  head += " seed=" + std::to_string(path.config().seed);
  os << head << '\n';
  write_path_csv(os, path.samples());
}

}  // namespace latticefbm
