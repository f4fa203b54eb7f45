#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "fracheat/errors.hpp"
#include "fracheat/experiment.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  std::string control_csv;
  long long seed = -1;
  int case_id = 0;
  std::vector<std::string> sets;
};

fracheat::ExperimentConfig resolve(const CliArgs& args) {
  fracheat::ExperimentConfig config;
  if (!args.config_path.empty()) {
    config = fracheat::ExperimentConfig::from_file(args.config_path);
  }
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw fracheat::config_error("--set expects key=value, got: " + kv);
    }
    config.set_key(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (!args.control_csv.empty()) config.control_csv = args.control_csv;
  if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
  if (args.case_id != 0) config.case_id = args.case_id;
  return config;
}

void add_common(CLI::App* cmd, CliArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key = value configuration file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "random seed for seeded ensembles");
  cmd->add_option("--case", args.case_id, "case selector (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  cmd->add_option("--set", args.sets, "override a config key, e.g. --set s=0.6");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained exterior control laboratory for the 1-D fractional heat equation"};
  app.require_subcommand(1);

  CliArgs args;
  auto* eig = app.add_subcommand("eig", "eigenvalue/trace table and asymptotic check");
  auto* solve = app.add_subcommand("solve", "forward Robin solve, optionally replaying a control");
  solve->add_option("--control", args.control_csv, "replay a control from a t,x,g CSV");
  auto* control = app.add_subcommand("control", "constrained tracking solve at a fixed horizon");
  auto* mintime = app.add_subcommand("mintime", "bisection search for the minimal horizon");
  auto* diagnose = app.add_subcommand("diagnose", "observability diagnostics over a horizon sweep");
  for (auto* cmd : {eig, solve, control, mintime, diagnose}) add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    const fracheat::ExperimentConfig config = resolve(args);
    fracheat::ExperimentReport report;
    if (eig->parsed()) report = fracheat::run_eig(config);
    else if (solve->parsed()) report = fracheat::run_solve(config);
    else if (control->parsed()) report = fracheat::run_control(config);
    else if (mintime->parsed()) report = fracheat::run_mintime(config);
    else report = fracheat::run_diagnose(config);
    std::fputs(report.json_text.c_str(), stdout);
    return 0;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
}
