// invex: command-line front end.
//
//   invex certify1d <reciprocal|exp_neg|exp|identity> <lo> <hi> [--count N]
//   invex theorem1 [--pair NAME] [--config PATH] [--seed N] [--samples N]
//   invex pathway steady-state --e e1,e2,e3 [--config PATH]
//   invex pathway optimize --eT T [--resolution N] [--config PATH]
//   invex pathway concavity [--samples N] [--seed N] [--config PATH]
//
// Every command accepts --out PATH (JSON report, default stdout) and
// --csv PATH (per-sample table). Exit codes: 0 success, 2 usage or config
// error, 3 numerical failure, 4 theorem contradiction.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "invex/cli/commands.hpp"

namespace {

using invex::cli::CommandResult;
using invex::cli::Config;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::string out_path;
  std::string csv_path;
};

void add_common(CLI::App* app, Common& c, bool sampling) {
  app->add_option("--config", c.config_path, "Model/sampling/tolerance configuration file");
  app->add_option("--out", c.out_path, "Write the JSON report here instead of stdout");
  app->add_option("--csv", c.csv_path, "Write the per-sample table as CSV");
  if (sampling) {
    app->add_option("--seed", c.seed, "Override sampling.seed");
    app->add_option("--samples", c.samples, "Override sampling.count")->check(CLI::PositiveNumber);
  } else {
    app->add_option("--seed", c.seed, "Seed echoed in the report");
  }
}

Config resolve_config(const Common& c) {
  Config cfg = c.config_path.empty() ? Config{} : invex::cli::load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.samples) cfg.count = *c.samples;
  return cfg;
}

int emit(const CommandResult& r, const Common& c) {
  const std::string text = invex::cli::dump_canonical(r.report) + "\n";
  if (c.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out_path);
    if (!f) {
      std::cerr << "invex: cannot write " << c.out_path << "\n";
      return invex::cli::kExitUsage;
    }
    f << text;
  }
  if (!c.csv_path.empty() && !r.csv.empty()) {
    std::ofstream f(c.csv_path);
    if (!f) {
      std::cerr << "invex: cannot write " << c.csv_path << "\n";
      return invex::cli::kExitUsage;
    }
    f << r.csv;
  }
  return r.exit_code;
}

// Loads the config inside the guard so parse errors become error reports.
int run(const std::string& command, const Common& c, const std::function<CommandResult(const Config&)>& body) {
  Config seen;
  const auto r = invex::cli::run_guarded(command, seen, [&] {
    seen = resolve_config(c);
    return body(seen);
  });
  return emit(r, c);
}

std::optional<invex::pathway::EnzymeVector> parse_enzymes(const std::string& text) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (v.size() != 3) return std::nullopt;
  return invex::pathway::EnzymeVector{{v[0], v[1], v[2]}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampled convexity certificates for inverse maps and the linear-pathway application"};
  app.require_subcommand(1);

  Common c1d;
  std::string fn_name;
  double lo = 0.0, hi = 0.0;
  int count = 100;
  auto* certify = app.add_subcommand("certify1d", "Scalar convexity scan of f and of its inverse");
  certify->add_option("function", fn_name, "reciprocal | exp_neg | exp | identity")->required();
  certify->add_option("lo", lo, "Interval lower end")->required();
  certify->add_option("hi", hi, "Interval upper end")->required();
  certify->add_option("--count", count, "Number of equispaced points")->check(CLI::PositiveNumber);
  add_common(certify, c1d, false);

  Common cth;
  std::string pair = "pathway";
  auto* theorem = app.add_subcommand("theorem1", "Verify the negative-gradient inverse convexity criterion");
  theorem->add_option("--pair", pair, "pathway | reciprocal | exp_neg | exp | identity");
  add_common(theorem, cth, true);

  auto* pw = app.add_subcommand("pathway", "Linear three-enzyme pathway");
  pw->require_subcommand(1);

  Common css;
  std::string enzymes;
  auto* ss = pw->add_subcommand("steady-state", "Steady-state concentrations and flux");
  ss->add_option("--e", enzymes, "Enzyme levels e1,e2,e3")->required();
  add_common(ss, css, false);

  Common copt;
  double e_total = 1.0;
  int resolution = 256;
  auto* opt = pw->add_subcommand("optimize", "Optimal enzyme allocation for a total enzyme budget");
  opt->add_option("--eT", e_total, "Total enzyme e1+e2+e3")->check(CLI::PositiveNumber);
  opt->add_option("--resolution", resolution, "Grid-oracle resolution")->check(CLI::Range(16, 4096));
  add_common(opt, copt, false);

  Common ccv;
  auto* conc = pw->add_subcommand("concavity", "Sampled concavity check of the specific flux");
  add_common(conc, ccv, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return invex::cli::kExitUsage;
  }

  if (*certify) {
    return run("certify1d", c1d, [&](const Config& cfg) {
      return invex::cli::cmd_certify1d(fn_name, lo, hi, count, cfg);
    });
  }
  if (*theorem) {
    return run("theorem1", cth, [&](const Config& cfg) { return invex::cli::cmd_theorem1(cfg, pair); });
  }
  if (*ss) {
    return run("pathway steady-state", css, [&](const Config& cfg) {
      const auto e = parse_enzymes(enzymes);
      if (!e) throw invex::config_error("--e expects three comma-separated numbers", 0, "e");
      return invex::cli::cmd_steady_state(cfg, *e);
    });
  }
  if (*opt) {
    return run("pathway optimize", copt,
               [&](const Config& cfg) { return invex::cli::cmd_optimize(cfg, e_total, resolution); });
  }
  if (*conc) {
    return run("pathway concavity", ccv, [&](const Config& cfg) { return invex::cli::cmd_concavity(cfg); });
  }
  return invex::cli::kExitUsage;
}
