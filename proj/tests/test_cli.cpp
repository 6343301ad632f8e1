#include <string>

#include <gtest/gtest.h>

#include "invex/cli/commands.hpp"

namespace {

namespace cli = invex::cli;
using cli::json;

TEST(Config, DefaultsWhenEmpty) {
  const auto c = cli::parse_config("# nothing here\n\n");
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.count, 100);
  EXPECT_DOUBLE_EQ(c.model.x0, 10.0);
  EXPECT_DOUBLE_EQ(c.pd, 1e-4);
  EXPECT_FALSE(c.z_box);
}

TEST(Config, FullFile) {
  const auto c = cli::parse_config(R"(
[model]
a = [1, 2, 3]
b = [0.5, 0.5, 0.5]
c = [1, 1, 1]
x0 = 20

[sampling]
seed = 42
count = 7
z_box = [[1.5, 3], [2.5, 4], [3.5, 5]]
e_box = [[0.1, 1], [0.1, 1], [0.1, 1]]

[tolerances]
pd = 1e-3
fd = 2e-4
solver = 1e-11
)");
  EXPECT_DOUBLE_EQ(c.model.a[2], 3.0);
  EXPECT_DOUBLE_EQ(c.model.b[0], 0.5);
  EXPECT_DOUBLE_EQ(c.model.x0, 20.0);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.count, 7);
  ASSERT_TRUE(c.z_box);
  EXPECT_DOUBLE_EQ((*c.z_box)[1].hi, 4.0);
  EXPECT_DOUBLE_EQ(c.fd, 2e-4);
  EXPECT_DOUBLE_EQ(c.solver, 1e-11);
}

TEST(Config, WrongArityNamesFieldAndLine) {
  try {
    (void)cli::parse_config("[model]\nx0 = 10\na = [1, 2]\n");
    FAIL() << "expected config_error";
  } catch (const invex::config_error& e) {
    EXPECT_EQ(e.field(), "model.a");
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, Rejections) {
  EXPECT_THROW(cli::parse_config("[model]\nx0 = -1\n"), invex::config_error);
  EXPECT_THROW(cli::parse_config("[nope]\n"), invex::config_error);
  EXPECT_THROW(cli::parse_config("[model]\nd = 1\n"), invex::config_error);
  EXPECT_THROW(cli::parse_config("seed = 1\n"), invex::config_error);
  EXPECT_THROW(cli::parse_config("[sampling]\ncount = 1.5\n"), invex::config_error);
  EXPECT_THROW(cli::parse_config("[sampling]\nseed = 1\nseed = 2\n"), invex::config_error);
  EXPECT_THROW(cli::parse_config("[sampling]\nz_box = [[0.5, 2], [1.5, 2], [1.5, 2]]\n"), invex::config_error);
  EXPECT_THROW(cli::load_config("/nonexistent/invex.cfg"), invex::config_error);
}

TEST(Report, CanonicalJsonSortsKeysAndPrintsFullPrecision) {
  const json j = {{"b", 0.1}, {"a", {1, 2}}, {"c", "x"}};
  EXPECT_EQ(cli::dump_canonical(j, -1), R"({"a":[1,2],"b":0.10000000000000001,"c":"x"})");
}

TEST(Report, DigestIsStableAndSensitive) {
  cli::Config a, b;
  EXPECT_EQ(cli::config_digest(a), cli::config_digest(b));
  EXPECT_EQ(cli::config_digest(a).size(), 64u);
  b.seed = 1;
  EXPECT_NE(cli::config_digest(a), cli::config_digest(b));
  EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Commands, Certify1dVerdicts) {
  const auto r = cli::cmd_certify1d("reciprocal", 0.1, 10.0, 100);
  EXPECT_EQ(r.exit_code, cli::kExitOk);
  EXPECT_EQ(r.report["results"]["inverse"]["verdict"], "inverse_convex");
  EXPECT_LE(r.report["results"]["inverse"]["max_relative_fd_error"].get<double>(), 1e-5);
  EXPECT_FALSE(r.csv.empty());
  EXPECT_EQ(cli::cmd_certify1d("exp", -2.0, 2.0, 100).report["results"]["inverse"]["verdict"], "inverse_not_convex");
  EXPECT_THROW(cli::cmd_certify1d("sqrt", 0.0, 1.0, 10), invex::config_error);
  EXPECT_THROW(cli::cmd_certify1d("reciprocal", -1.0, 1.0, 10), invex::config_error);
}

TEST(Commands, Theorem1ReciprocalHolds) {
  cli::Config cfg;
  cfg.count = 20;
  const auto r = cli::cmd_theorem1(cfg, "reciprocal");
  EXPECT_EQ(r.exit_code, cli::kExitOk);
  EXPECT_EQ(r.report["results"]["overall"], "hypotheses_hold_conclusion_holds");
}

TEST(Commands, Theorem1PathwayReport) {
  cli::Config cfg;
  cfg.count = 10;
  const auto r = cli::cmd_theorem1(cfg);
  EXPECT_NE(r.exit_code, cli::kExitContradiction);
  const auto& res = r.report["results"];
  EXPECT_EQ(res["samples"], 10);
  EXPECT_TRUE(res["residuals_within_tolerance"].get<bool>());
  EXPECT_TRUE(res["support_restricted"]["gradient_negative_on_support_zero_elsewhere"].get<bool>());
  EXPECT_EQ(res["congruence_consistency_mismatches"], 0);
  EXPECT_TRUE(r.report.contains("config_digest"));
}

TEST(Commands, SteadyStateAndOptimize) {
  const auto s = cli::cmd_steady_state({}, {{1.0, 1.0, 1.0}});
  EXPECT_NEAR(s.report["results"]["flux"].get<double>(), 0.4679328695782614, 1e-12);
  const auto o = cli::cmd_optimize({}, 3.0, 64);
  EXPECT_EQ(o.exit_code, cli::kExitOk);
  EXPECT_LE(o.report["results"]["oracle_gap"].get<double>(), 0.1);
}

TEST(Commands, ConcavityIsDeterministic) {
  cli::Config cfg;
  cfg.count = 5;
  cfg.seed = 9;
  const auto a = cli::cmd_concavity(cfg);
  const auto b = cli::cmd_concavity(cfg);
  EXPECT_EQ(cli::dump_canonical(a.report["results"]), cli::dump_canonical(b.report["results"]));
  EXPECT_EQ(a.csv, b.csv);
}

TEST(Commands, GuardMapsErrorsToExitCodes) {
  const auto r = cli::run_guarded("x", {}, []() -> cli::CommandResult {
    throw invex::config_error("line 2: model.a: bad", 2, "model.a");
  });
  EXPECT_EQ(r.exit_code, cli::kExitUsage);
  EXPECT_EQ(r.report["error"]["field"], "model.a");
  const auto n = cli::run_guarded("x", {}, []() -> cli::CommandResult {
    throw invex::infeasible_state("no state");
  });
  EXPECT_EQ(n.exit_code, cli::kExitNumerical);
}

}  // namespace
