#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "latticefbm/error.hpp"
#include "latticefbm/fbm_noise.hpp"
#include "latticefbm/holder_spaces.hpp"
#include "latticefbm/lattice_ops.hpp"
#include "latticefbm/mild_solver.hpp"
#include "latticefbm/stability_lab.hpp"

namespace latticefbm {

enum class ExperimentKind { fbm, integrate, solve, cocycle, stability, appendix };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::fbm: return "fbm";
    case ExperimentKind::integrate: return "integrate";
    case ExperimentKind::solve: return "solve";
    case ExperimentKind::cocycle: return "cocycle";
    case ExperimentKind::stability: return "stability";
    case ExperimentKind::appendix: return "appendix";
  }
  return "?";
}

inline std::optional<ExperimentKind> parse_kind(std::string_view s) {
  for (auto k : {ExperimentKind::fbm, ExperimentKind::integrate, ExperimentKind::solve, ExperimentKind::cocycle,
                 ExperimentKind::stability, ExperimentKind::appendix})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

/// Flat key=value experiment description. The raw fields below are what the
/// file sets; noise(), model(), solver() and stability() assemble the typed
/// configs after validation.
struct ExperimentConfig {
  // [experiment]
  ExperimentKind kind = ExperimentKind::solve;
  std::string output_dir = "out";
  std::vector<std::uint64_t> seeds{1};
  int grid_exp = 10;

  // [noise]
  double hurst = 0.75;
  double sigma_scale = 0.5;
  std::string sigma_profile = "peaked";  // peaked | uniform

  // [model]
  double nu = 1.0;
  double lambda = 1.0;
  std::size_t window = 64;
  std::string boundary = "periodic";  // periodic | zero_padded
  std::string family = "auto";        // auto | generic | stability | zero
  double a = 0.5;
  double b = 0.5;
  double delta = 1.0;

  // [solver]; negative exponents mean "derive from hurst"
  double beta = -1.0;
  double beta_prime = -1.0;
  double alpha = -1.0;
  double horizon = 1.0;
  double picard_tol = 1e-10;
  int picard_max_iter = 100;
  bool rho_auto = true;
  double rho = 0.0;
  double rho_max = 65536.0;
  std::string backend = "young_sums";  // young_sums | fractional

  // [stability]; C = 0 selects the calibrated constant
  double eps_hat = 0.2;
  double mu = 0.5;
  int n_max = 20;
  double C = 0.0;
  double initial_scale = 1.0;
  double eps = 0.01;

  // [cocycle]
  double cocycle_t = 0.5;
  double cocycle_tau = 0.5;

  // [appendix]
  int trials = 1000;

  double grid_step() const { return std::ldexp(1.0, -grid_exp); }

  std::string resolved_family() const {
    if (family != "auto") return family;
    return kind == ExperimentKind::stability ? "stability" : "generic";
  }

  HolderConfig holder() const {
    HolderConfig h = HolderConfig::defaults_for_hurst(hurst);
    if (beta >= 0.0) h.beta = beta;
    if (beta_prime >= 0.0) h.beta_prime = beta_prime;
    if (alpha >= 0.0) h.alpha = alpha;
    h.rho = rho;
    return h;
  }

  LatticeModel model() const {
    LatticeModel m;
    m.nu = nu;
    m.lambda = lambda;
    m.window = window;
    m.boundary = boundary == "zero_padded" ? Boundary::zero_padded : Boundary::periodic;
    const std::string fam = resolved_family();
    if (fam == "generic") m.family = NonlinearityFamily::generic_default(a, b);
    else if (fam == "stability") m.family = NonlinearityFamily::stability_default(a, b, delta);
    else m.family = NonlinearityFamily::zero();
    return m;
  }

  SolverConfig solver() const {
    SolverConfig s;
    s.holder = holder();
    s.horizon = horizon;
    s.grid_step = grid_step();
    s.picard_tol = picard_tol;
    s.picard_max_iter = picard_max_iter;
    s.rho_auto = rho_auto;
    s.rho = rho;
    s.rho_max = rho_max;
    s.backend = backend == "fractional" ? IntegralBackend::fractional : IntegralBackend::young_sums;
    return s;
  }

  /// Time span the noise must cover on each side of 0.
  double noise_horizon() const {
    double need = horizon;
    if (kind == ExperimentKind::stability) need = std::max(need, static_cast<double>(n_max) + 1.0);
    if (kind == ExperimentKind::cocycle) need = std::max(need, cocycle_t + cocycle_tau);
    return std::ceil(need);
  }

  NoiseConfig noise(std::uint64_t seed) const {
    NoiseConfig n;
    n.hurst = hurst;
    n.sigma = sigma_profile == "uniform" ? std::vector<double>(window, sigma_scale)
                                         : NoiseConfig::default_sigma(window, sigma_scale);
    n.horizon = noise_horizon();
    n.grid_step = grid_step();
    n.seed = seed;
    return n;
  }

  /// C is left at its configured value; 0 is replaced by the harness.
  StabilityConfig stability() const {
    StabilityConfig s;
    s.eps_hat = eps_hat;
    s.mu = mu;
    s.n_max = n_max;
    s.C = C;
    s.initial_scale = initial_scale;
    s.eps = eps;
    return s;
  }

  void validate() const {
    require(hurst > 0.5 && hurst < 1.0, "hurst must lie in (0.5,1)");
    require(!seeds.empty(), "seed list must be non-empty");
    require(grid_exp >= 1 && grid_exp <= 20, "grid_exp must lie in [1, 20]");
    require(sigma_profile == "peaked" || sigma_profile == "uniform", "sigma_profile must be peaked or uniform");
    require(boundary == "periodic" || boundary == "zero_padded", "boundary must be periodic or zero_padded");
    require(family == "auto" || family == "generic" || family == "stability" || family == "zero",
            "family must be auto, generic, stability or zero");
    require(backend == "young_sums" || backend == "fractional", "backend must be young_sums or fractional");
    require(nu > 0.0, "nu must be positive");
    require(delta > 0.0, "delta must be positive");
    require(trials >= 1, "trials must be at least 1");
    require(cocycle_t >= 0.0 && cocycle_tau >= 0.0, "cocycle times must be nonnegative");
    noise(seeds.front()).validate();
    model().validate();
    solver().validate(hurst);
    if (kind == ExperimentKind::stability) {
      require(resolved_family() == "stability" || resolved_family() == "zero",
              "stability runs need the stability family");
      StabilityConfig s = stability();
      if (s.C == 0.0) s.C = 1.0;  // placeholder; C itself is computed later
      else require(C > 0.0, "C must be positive");
      s.validate(lambda);
    } else {
      require(eps_hat > 0.0 && eps_hat < 1.0 - std::exp(-lambda), "eps_hat must lie in (0, 1 - exp(-lambda))");
    }
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
T parse_number(std::string_view v, std::size_t line) {
  T out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) throw ParseError(line, "not a number: '" + std::string(v) + "'");
  return out;
}

inline bool parse_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError(line, "not a boolean: '" + std::string(v) + "'");
}

struct ConfigKey {
  std::string section;
  std::string key;
  std::function<void(std::string_view, std::size_t)> set;
  std::function<std::string()> get;
};

inline std::vector<ConfigKey> config_keys(ExperimentConfig& c) {
  std::vector<ConfigKey> k;
  auto num = [&k](std::string sec, std::string key, double& ref) {
    k.push_back({sec, key, [&ref](std::string_view v, std::size_t l) { ref = parse_number<double>(v, l); },
                 [&ref] { return format_double(ref); }});
  };
  auto integer = [&k](std::string sec, std::string key, int& ref) {
    k.push_back({sec, key, [&ref](std::string_view v, std::size_t l) { ref = parse_number<int>(v, l); },
                 [&ref] { return std::to_string(ref); }});
  };
  auto text = [&k](std::string sec, std::string key, std::string& ref) {
    k.push_back({sec, key, [&ref](std::string_view v, std::size_t) { ref = std::string(v); }, [&ref] { return ref; }});
  };
  k.push_back({"experiment", "kind",
               [&c](std::string_view v, std::size_t l) {
                 const auto kind = parse_kind(v);
                 if (!kind) throw ParseError(l, "unknown experiment kind '" + std::string(v) + "'");
                 c.kind = *kind;
               },
               [&c] { return to_string(c.kind); }});
  text("experiment", "output_dir", c.output_dir);
  k.push_back({"experiment", "seeds",
               [&c](std::string_view v, std::size_t l) {
                 c.seeds.clear();
                 while (!v.empty()) {
                   const auto comma = v.find(',');
                   c.seeds.push_back(parse_number<std::uint64_t>(trim(v.substr(0, comma)), l));
                   if (comma == std::string_view::npos) break;
                   v.remove_prefix(comma + 1);
                 }
               },
               [&c] {
                 std::string s;
                 for (std::size_t i = 0; i < c.seeds.size(); ++i) s += (i ? "," : "") + std::to_string(c.seeds[i]);
                 return s;
               }});
  integer("experiment", "grid_exp", c.grid_exp);
  num("noise", "hurst", c.hurst);
  num("noise", "sigma_scale", c.sigma_scale);
  text("noise", "sigma_profile", c.sigma_profile);
  num("model", "nu", c.nu);
  num("model", "lambda", c.lambda);
  k.push_back({"model", "window",
               [&c](std::string_view v, std::size_t l) { c.window = parse_number<std::size_t>(v, l); },
               [&c] { return std::to_string(c.window); }});
  text("model", "boundary", c.boundary);
  text("model", "family", c.family);
  num("model", "a", c.a);
  num("model", "b", c.b);
  num("model", "delta", c.delta);
  num("solver", "beta", c.beta);
  num("solver", "beta_prime", c.beta_prime);
  num("solver", "alpha", c.alpha);
  num("solver", "horizon", c.horizon);
  num("solver", "picard_tol", c.picard_tol);
  integer("solver", "picard_max_iter", c.picard_max_iter);
  k.push_back({"solver", "rho_auto", [&c](std::string_view v, std::size_t l) { c.rho_auto = parse_bool(v, l); },
               [&c] { return std::string(c.rho_auto ? "true" : "false"); }});
  num("solver", "rho", c.rho);
  num("solver", "rho_max", c.rho_max);
  text("solver", "backend", c.backend);
  num("stability", "eps_hat", c.eps_hat);
  num("stability", "mu", c.mu);
  integer("stability", "n_max", c.n_max);
  num("stability", "C", c.C);
  num("stability", "initial_scale", c.initial_scale);
  num("stability", "eps", c.eps);
  num("cocycle", "t", c.cocycle_t);
  num("cocycle", "tau", c.cocycle_tau);
  integer("appendix", "trials", c.trials);
  return k;
}

}  // namespace detail

/// Parses [section] headers and key = value lines; '#' and ';' start comments.
/// Unknown sections or keys and repeated keys are parse errors. The result is
/// validated before it is returned.
inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  auto keys = detail::config_keys(c);
  std::vector<std::string> seen;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "malformed section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      bool known = false;
      for (const auto& k : keys) known = known || k.section == section;
      if (!known) throw ParseError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    if (section.empty()) throw ParseError(line_no, "key outside of a section");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    const std::string full = section + "." + key;
    auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& k) { return k.section == section && k.key == key; });
    if (it == keys.end()) throw ParseError(line_no, "unknown key '" + full + "'");
    if (std::find(seen.begin(), seen.end(), full) != seen.end()) throw ParseError(line_no, "repeated key '" + full + "'");
    seen.push_back(full);
    if (value.empty()) throw ParseError(line_no, "empty value for '" + full + "'");
    it->set(value, line_no);
  }
  c.validate();
  return c;
}

/// Every key with its effective value, in the file layout parse_config accepts.
inline std::string echo_config(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  if (c.family == "auto") c.family = c.resolved_family();
  const HolderConfig h = c.holder();
  if (c.beta < 0.0) c.beta = h.beta;
  if (c.beta_prime < 0.0) c.beta_prime = h.beta_prime;
  if (c.alpha < 0.0) c.alpha = h.alpha;
  std::ostringstream os;
  std::string section;
  for (const auto& k : detail::config_keys(c)) {
    if (k.section != section) {
      os << (section.empty() ? "" : "\n") << '[' << k.section << "]\n";
      section = k.section;
    }
    os << k.key << " = " << k.get() << '\n';
  }
  return os.str();
}

}  // namespace latticefbm
