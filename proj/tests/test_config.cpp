#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "latticefbm/config.hpp"
#include "latticefbm/experiments.hpp"

using namespace latticefbm;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("latticefbm_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string small(const std::string& kind, const std::filesystem::path& out) {
  return "[experiment]\nkind = " + kind + "\noutput_dir = " + out.string() +
         "\nseeds = 3, 4\ngrid_exp = 6\n[model]\nwindow = 6\n";
}

}  // namespace

TEST(ParseConfig, EmptyFileGivesDefaults) {
  const ExperimentConfig c = parse_config("");
  EXPECT_EQ(c.kind, ExperimentKind::solve);
  EXPECT_EQ(c.seeds, std::vector<std::uint64_t>{1});
  const std::string echo = echo_config(c);
  EXPECT_NE(echo.find("[noise]\nhurst = 0.75\n"), std::string::npos);
  EXPECT_NE(echo.find("family = generic\n"), std::string::npos);
  EXPECT_NE(echo.find("beta = 0.5833333333333334\n"), std::string::npos);
  // the echo is itself a valid config with the same effective values
  EXPECT_EQ(echo_config(parse_config(echo)), echo);
}

TEST(ParseConfig, CommentsSectionsAndValues) {
  const ExperimentConfig c = parse_config(
      "# leading comment\n[experiment]\nkind = stability ; trailing\nseeds = 1,2, 3\n\n[model]\nlambda=2\n"
      "boundary = zero_padded\n[solver]\nrho_auto = false\n");
  EXPECT_EQ(c.kind, ExperimentKind::stability);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_DOUBLE_EQ(c.lambda, 2.0);
  EXPECT_EQ(c.model().boundary, Boundary::zero_padded);
  EXPECT_EQ(c.model().family.kind, FamilyKind::stability);
  EXPECT_FALSE(c.solver().rho_auto);
}

TEST(ParseConfig, HurstGate) {
  try {
    parse_config("[noise]\nhurst = 0.4\n");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_STREQ(e.what(), "hurst must lie in (0.5,1)");
  }
}

TEST(ParseConfig, EpsHatGate) {
  try {
    parse_config("[model]\nlambda = 0.5\n[stability]\neps_hat = 0.9\n");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_STREQ(e.what(), "eps_hat must lie in (0, 1 - exp(-lambda))");
  }
  EXPECT_NO_THROW(parse_config("[model]\nlambda = 0.5\n[stability]\neps_hat = 0.39\nmu = 0.01\n"));
}

TEST(ParseConfig, ExponentViolationsNameTheConstraint) {
  try {
    parse_config("[solver]\nbeta = 0.5\n");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_STREQ(e.what(), "beta must exceed 1/2");
  }
}

TEST(ParseConfig, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("[model]\nnu = 1\nbogus = 2\n"), 3u);
  EXPECT_EQ(line_of("\n\n[nowhere]\n"), 3u);
  EXPECT_EQ(line_of("nu = 1\n"), 1u);
  EXPECT_EQ(line_of("[model]\nnu = abc\n"), 2u);
  EXPECT_EQ(line_of("[model]\nnu = 1\nnu = 2\n"), 3u);
  EXPECT_EQ(line_of("[experiment]\nkind = plot\n"), 2u);
  EXPECT_EQ(line_of("[model\n"), 1u);
}

TEST(RunExperiment, ReproducibleCsv) {
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  std::ostringstream log;
  EXPECT_EQ(run_experiment(parse_config(small("solve", a)), log), kExitOk);
  EXPECT_EQ(run_experiment(parse_config(small("solve", b)), log), kExitOk);
  EXPECT_EQ(slurp(a / "solve.csv"), slurp(b / "solve.csv"));
  EXPECT_EQ(slurp(a / "solution_3.csv"), slurp(b / "solution_3.csv"));
  EXPECT_EQ(slurp(a / "solve.csv").rfind("seed,iterations,rho,", 0), 0u);
}

TEST(RunExperiment, StabilitySchema) {
  const auto out = scratch("stability");
  std::ostringstream log;
  const ExperimentConfig c =
      parse_config(small("stability", out) + "[stability]\nn_max = 3\n");
  const int status = run_experiment(c, log);
  EXPECT_TRUE(status == kExitOk || status == kExitNotCertified);
  const std::string csv = slurp(out / "stability_3.csv");
  EXPECT_EQ(csv.rfind("n,norm_beta,R,R_hat,gronwall_bound,cutoff_active\n", 0), 0u);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_EQ(lines, 4u);
  const std::string summary = slurp(out / "summary.txt");
  EXPECT_NE(summary.find("fitted_rate = "), std::string::npos);
  EXPECT_NE(summary.find("target_mu = 0.5"), std::string::npos);
  EXPECT_NE(summary.find("verdict = "), std::string::npos);
}

TEST(RunExperiment, AppendixAndOtherKinds) {
  std::ostringstream log;
  for (const char* kind : {"appendix", "fbm", "integrate", "cocycle"}) {
    const auto out = scratch(kind);
    EXPECT_EQ(run_experiment(parse_config(small(kind, out)), log), kExitOk) << kind << '\n' << log.str();
    EXPECT_TRUE(std::filesystem::exists(out / "summary.txt"));
  }
  EXPECT_NE(log.str().find("l8 enumeration: 1000/1000"), std::string::npos);
}

TEST(RunExperiment, UnwritableOutputIsReported) {
  ExperimentConfig c = parse_config("");
  c.output_dir = "/proc/latticefbm_no_such_dir";
  std::ostringstream log;
  try {
    run_experiment(c, log);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/proc/latticefbm_no_such_dir"), std::string::npos);
  }
}
