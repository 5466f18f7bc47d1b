#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "latticefbm/config.hpp"
#include "latticefbm/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice equations driven by fractional Brownian motion"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_exp;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--out", out_dir, "output directory (overrides [experiment] output_dir)");
  app.add_option("--seed", seed, "single seed, replaces the configured seed list");
  app.add_option("--grid-exp", grid_exp, "grid step 2^-k");
  for (const char* kind : {"fbm", "integrate", "solve", "cocycle", "stability", "appendix"}) {
    app.add_subcommand(kind, std::string("run the ") + kind + " experiment")->fallthrough();
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const std::string kind = app.get_subcommands().front()->get_name();
    std::string text = config_path.empty() ? std::string() : read_file(config_path);
    latticefbm::ExperimentConfig cfg = latticefbm::parse_config(text);
    cfg.kind = *latticefbm::parse_kind(kind);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) cfg.seeds = {*seed};
    if (grid_exp) cfg.grid_exp = *grid_exp;
    cfg.validate();
    return latticefbm::run_experiment(cfg, std::cout);
  } catch (const latticefbm::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return latticefbm::kExitFailure;
}
