#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mismc/errors.hpp"
#include "mismc/harness/config.hpp"
#include "mismc/harness/experiment.hpp"
#include "mismc/parallel.hpp"

namespace {

struct GlobalOpts {
  std::string config_path;
  mismc::RunOverrides overrides;
};

void add_common(CLI::App* cmd, GlobalOpts& g, std::uint64_t& seed_raw,
                std::string& out_dir_raw) {
  cmd->add_option("config", g.config_path, "experiment config file (JSON)")
      ->required();
  cmd->add_option("--seed", seed_raw, "override the master seed");
  cmd->add_option("--threads", g.overrides.threads, "worker thread count");
  cmd->add_option("--out-dir", out_dir_raw, "override the output directory");
  cmd->add_option("--format", g.overrides.format, "record format")
      ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-index sequential Monte Carlo experiment runner"};
  app.require_subcommand(1);

  GlobalOpts g;
  std::uint64_t seed_raw = 0;
  std::string out_dir_raw;

  auto* run = app.add_subcommand("run", "run a full MSE-vs-cost experiment");
  auto* rates = app.add_subcommand("rates", "fit increment convergence rates");
  auto* reference = app.add_subcommand("reference", "compute and cache the reference value");
  auto* simulate = app.add_subcommand("simulate-data", "synthesize observations or point patterns");
  auto* validate = app.add_subcommand("validate", "check a config file");
  for (CLI::App* cmd : {run, rates, reference, simulate, validate})
    add_common(cmd, g, seed_raw, out_dir_raw);

  CLI11_PARSE(app, argc, argv);

  try {
    mismc::ExperimentConfig cfg = mismc::load_config(g.config_path);
    for (CLI::App* cmd : {run, rates, reference, simulate, validate}) {
      if (!cmd->parsed()) continue;
      if (cmd->count("--seed")) g.overrides.seed = seed_raw;
      if (cmd->count("--out-dir")) g.overrides.out_dir = out_dir_raw;
    }
    if (g.overrides.threads > 0) mismc::set_threads(g.overrides.threads);

    if (validate->parsed()) {
      // Validate every section that is present.
      mismc::validate_config(cfg, "none");
      if (cfg.has_run_section) mismc::validate_config(cfg, "run");
      if (cfg.has_sweep_section) mismc::validate_config(cfg, "rates");
      if (cfg.model.data.synthesize.has_value())
        mismc::validate_config(cfg, "simulate-data");
      mismc::build_model(cfg.model);
      std::printf("config ok: %s\n", g.config_path.c_str());
      return 0;
    }
    if (run->parsed()) {
      const mismc::RunResult res = mismc::run_experiment(cfg, g.overrides);
      std::printf("run complete: %zu records, %d failures, outputs in %s\n",
                  res.records.size(), res.n_failed,
                  g.overrides.out_dir.value_or(cfg.output.dir).c_str());
      for (const auto& w : res.warnings)
        std::fprintf(stderr, "warning: %s\n", w.c_str());
      return 0;
    }
    if (rates->parsed()) {
      mismc::run_rates_command(cfg, g.overrides);
      std::printf("rates written to %s\n",
                  g.overrides.out_dir.value_or(cfg.output.dir).c_str());
      return 0;
    }
    if (reference->parsed()) {
      mismc::run_reference_command(cfg, g.overrides);
      std::printf("reference written to %s\n",
                  g.overrides.out_dir.value_or(cfg.output.dir).c_str());
      return 0;
    }
    if (simulate->parsed()) {
      mismc::run_simulate_data(cfg, g.overrides);
      std::printf("data written to %s\n",
                  g.overrides.out_dir.value_or(cfg.output.dir).c_str());
      return 0;
    }
  } catch (const mismc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const mismc::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
