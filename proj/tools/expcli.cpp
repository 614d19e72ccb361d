// Batch experiment runner: drives simulations, parameter sweeps and the
// verification commands from JSON configs, writing CSV series and JSON
// summaries.

#include <CLI11.hpp>

#include "antic/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"anticipation-dynamics experiment runner"};
  app.require_subcommand(1);

  antic::CliOptions opt;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config)
      cmd->add_option("--config", opt.config, "experiment config (JSON)")->required();
    cmd->add_option("--out", opt.out_dir, "output directory (default: .)");
    cmd->add_flag("--quiet", opt.quiet, "suppress progress output");
    return cmd;
  };

  CLI::App* simulate = add_common(app.add_subcommand("simulate", "run one model"));
  simulate->add_option("--seed", seed_value, "override the config seed");
  CLI::App* sweep = add_common(app.add_subcommand("sweep", "run a parameter grid"));
  sweep->add_option("--seed", seed_value, "override the config seed");
  CLI::App* polar =
      add_common(app.add_subcommand("polar", "two-agent polar-coordinate run"));
  CLI::App* hydro =
      add_common(app.add_subcommand("hydro1d", "1D hydrodynamic threshold run"));
  CLI::App* classify = add_common(
      app.add_subcommand("classify-potential", "audit a potential's assumption classes"));

  antic::MeansCheckOptions mopt;
  CLI::App* means = app.add_subcommand("means-check", "randomized local-vs-global means audit");
  means->add_option("--seed", mopt.seed, "random seed");
  means->add_option("--instances", mopt.instances, "number of random instances");
  means->add_option("--n-max", mopt.n_max, "maximum number of points per instance");
  means->add_option("--d-max", mopt.d_max, "maximum dimension per instance");
  means->add_option("--lam-max", mopt.lam_max, "lower weight bound drawn from (0, lam-max]");
  means->add_option("--cap-max", mopt.cap_max, "upper weight bound drawn from [lam, cap-max]");
  means->add_option("--out", mopt.out_dir, "output directory (default: .)");
  std::string means_summary;
  means->add_option("--summary", means_summary, "also write a JSON report with this name");
  means->add_flag("--quiet", mopt.quiet, "suppress progress output");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    if (simulate->count("--seed")) opt.seed = seed_value;
    return antic::run_simulate(opt);
  }
  if (sweep->parsed()) {
    if (sweep->count("--seed")) opt.seed = seed_value;
    return antic::run_sweep(opt);
  }
  if (polar->parsed()) return antic::run_polar(opt);
  if (hydro->parsed()) return antic::run_hydro1d(opt);
  if (classify->parsed()) return antic::run_classify(opt);
  if (means->parsed()) {
    if (means->count("--summary")) mopt.summary_name = means_summary;
    return antic::run_means_check(mopt);
  }
  return antic::kExitConfigError;
}
