#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace charflow::cli;
  CLI::App app{"charflow: characteristic solver for the generalized Camassa-Holm family"};
  app.require_subcommand(1);

  Context ctx;
  std::string out_dir = "run";
  long seed = 0;  // reserved; every run is deterministic
  std::string run_dir;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", ctx.config_path, "run configuration file");
    if (needs_config) opt->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "reserved, unused");
    sub->add_flag("--quiet", ctx.quiet, "suppress progress output");
  };
  auto* sim = app.add_subcommand("simulate", "integrate a scenario and write CSVs and a report");
  auto* cmp = app.add_subcommand("compare", "cross-check against the classical solver before breaking");
  auto* val = app.add_subcommand("validate", "check a config and its initial datum");
  auto* plots = app.add_subcommand("emit-plots", "render SVG plots from a run directory");
  add_common(sim, true);
  add_common(cmp, true);
  add_common(val, true);
  add_common(plots, false);
  plots->add_option("run_dir", run_dir, "run directory (defaults to --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }
  ctx.out_dir = out_dir;

  try {
    if (*sim) return simulate(ctx);
    if (*cmp) return compare(ctx);
    if (*val) return validate(ctx);
    if (*plots) return emit_plots(ctx, run_dir.empty() ? out_dir : run_dir);
  } catch (const charflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const charflow::DatumError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const charflow::ModelError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const charflow::BreakingApproached& e) {
    std::cerr << e.what() << '\n';
    return kPreBreaking;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kGateFailure;
  }
  return kConfigError;
}
