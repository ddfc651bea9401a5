// risvec command-line tool: training stages, testing, baselines, sweeps.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "risvec/experiment.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> episodes;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON config file (missing keys take the reference-profile defaults)");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--episodes", o.episodes, "Override the episode count of both training stages")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", o.quiet, "No progress output");
}

risvec::ExperimentConfig resolve(const CommonOptions& o) {
  risvec::ExperimentConfig cfg = o.config.empty() ? risvec::ExperimentConfig::reference() : risvec::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.episodes) cfg.set_episodes(*o.episodes);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted vehicular edge computing: phase and power learning"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string phase_ckpt;
  std::string power_dir;
  std::string baseline;
  std::string variable;
  std::vector<double> values;

  auto* train_phase = app.add_subcommand("train-phase", "Train the RIS phase-shift agent");
  add_common(train_phase, opts);

  auto* train_power = app.add_subcommand("train-power", "Train the per-vehicle power agents");
  add_common(train_power, opts);
  train_power->add_option("--phase-ckpt", phase_ckpt, "Phase checkpoint (default <out>/phase.ckpt)");

  auto* test = app.add_subcommand("test", "Greedy rollout of trained checkpoints");
  add_common(test, opts);
  test->add_option("--phase-ckpt", phase_ckpt, "Phase checkpoint (default <out>/phase.ckpt)");
  test->add_option("--power-dir", power_dir, "Directory of power_actor_<k>.ckpt (default <out>)");

  auto* base = app.add_subcommand("baseline", "Train and test a comparison scheme");
  add_common(base, opts);
  base->add_option("--baseline", baseline,
                   "centralized-ddpg | centralized-td3 | random-phase | no-ris | max-power | random-power");
  base->add_option("--phase-ckpt", phase_ckpt, "Phase checkpoint (default <out>/phase.ckpt when required)");

  auto* sweep = app.add_subcommand("sweep", "Train and test over a list of values");
  add_common(sweep, opts);
  sweep->add_option("--var", variable, "eta (Mbit/s) | N | K | seed")->required();
  sweep->add_option("--values", values, "Values of the swept variable")->required()->expected(1, -1);

  CLI11_PARSE(app, argc, argv);

  try {
    risvec::ExperimentConfig cfg = resolve(opts);
    std::ostream* log = opts.quiet ? nullptr : &std::cerr;
    const std::filesystem::path out(cfg.out_dir);
    const std::filesystem::path phase = phase_ckpt.empty() ? out / risvec::files::kPhaseCheckpoint : std::filesystem::path(phase_ckpt);

    if (train_phase->parsed()) {
      risvec::cmd_train_phase(cfg, log);
    } else if (train_power->parsed()) {
      risvec::cmd_train_power(cfg, phase, log);
    } else if (test->parsed()) {
      risvec::cmd_test(cfg, phase, power_dir.empty() ? out : std::filesystem::path(power_dir), log);
    } else if (base->parsed()) {
      if (!baseline.empty()) cfg.baseline = risvec::parse_baseline_kind(baseline);
      std::optional<std::filesystem::path> p;
      if (risvec::needs_phase_policy(cfg.baseline)) p = phase;
      risvec::cmd_baseline(cfg, p, log);
    } else if (sweep->parsed()) {
      risvec::cmd_sweep(cfg, variable, values, log);
    }
  } catch (const risvec::MissingFileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
