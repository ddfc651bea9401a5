#include "risvec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "risvec/baselines.hpp"
#include "risvec/maddpg.hpp"

namespace risvec {

namespace fs = std::filesystem;

namespace {

void write_manifest(const ExperimentConfig& cfg, const std::string& command) {
  nlohmann::json m;
  m["schema_version"] = kCsvSchemaVersion;
  m["command"] = command;
  m["config"] = nlohmann::json::parse(dump_config(cfg));
  fs::create_directories(cfg.out_dir);
  std::ofstream(fs::path(cfg.out_dir) / files::kManifest) << m.dump(2) << '\n';
}

// Prints roughly ten progress lines per run.
class Progress {
 public:
  Progress(std::ostream* log, std::string label, int total) : log_(log), label_(std::move(label)), total_(total) {}
  void operator()(int episode, double value) const {
    if (log_ == nullptr) return;
    const int every = std::max(1, total_ / 10);
    if ((episode + 1) % every == 0 || episode + 1 == total_)
      *log_ << label_ << " episode " << episode + 1 << "/" << total_ << " reward " << value << '\n';
  }

 private:
  std::ostream* log_;
  std::string label_;
  int total_;
};

SchemeOptions scheme_options(const ExperimentConfig& cfg, bool record_steps, const Progress& progress) {
  SchemeOptions o;
  o.seed = cfg.seed;
  o.test_seed = default_test_seed(cfg.seed);
  o.test_episodes = cfg.test_episodes;
  o.record_steps = record_steps;
  o.on_episode = [progress](const PowerEpisodeMetrics& m) { progress(m.episode, m.r_global_mean); };
  return o;
}

double mean_of(const std::vector<PowerEpisodeMetrics>& eps, double (*field)(const PowerEpisodeMetrics&)) {
  if (eps.empty()) return 0.0;
  double s = 0.0;
  for (const auto& m : eps) s += field(m);
  return s / static_cast<double>(eps.size());
}

std::string value_label(double v) {
  std::string s = format_double(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

}  // namespace

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw MissingFileError(path);
}

PhasePolicy load_compatible_phase_policy(const fs::path& path, const EnvConfig& env) {
  require_file(path);
  PhasePolicy policy = load_phase_policy(path);
  if (policy.actor().spec().input_size() != env.ris_state_dim() ||
      policy.actor().spec().output_size() != env.ris_elements || policy.bits() != env.phase_bits)
    throw ConfigError("phase checkpoint " + path.string() + " does not match the configured RIS size, " +
                      "phase bits or vehicle count");
  return policy;
}

void cmd_train_phase(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  write_manifest(cfg, "train-phase");
  const Progress progress(log, "phase", cfg.phase.episodes);
  PhaseTrainingResult r = train_phase_agent(cfg.env, cfg.phase, cfg.seed, [&](const PhaseEpisodeMetrics& m) {
    progress(m.episode, m.mean_ris_reward);
  });
  const fs::path out(cfg.out_dir);
  save_phase_checkpoint(out / files::kPhaseCheckpoint, r.nets, cfg.env);
  phase_episode_table(r.history).save(out / files::kPhaseEpisodes);
}

void cmd_train_power(const ExperimentConfig& cfg, const fs::path& phase_ckpt, std::ostream* log) {
  cfg.validate();
  PhaseController phases = PhaseController::from_policy(load_compatible_phase_policy(phase_ckpt, cfg.env));
  write_manifest(cfg, "train-power");
  const Progress progress(log, "power", cfg.power.base.episodes);
  PowerTrainingResult r = train_power_agents(cfg.env, cfg.power, phases, cfg.seed, "proposed",
                                             [&](const PowerEpisodeMetrics& m) { progress(m.episode, m.r_global_mean); });
  const fs::path out(cfg.out_dir);
  save_power_checkpoints(out, r.learner);
  power_episode_table(cfg.env.num_vehicles(), r.history).save(out / files::kPowerEpisodes);
}

void cmd_test(const ExperimentConfig& cfg, const fs::path& phase_ckpt, const fs::path& power_dir, std::ostream* log) {
  cfg.validate();
  const int k_count = cfg.env.num_vehicles();
  PhaseController phases = PhaseController::from_policy(load_compatible_phase_policy(phase_ckpt, cfg.env));
  for (int k = 0; k < k_count; ++k) require_file(actor_checkpoint_path(power_dir, k));
  DecentralizedPowerPolicy policy(load_power_actors(power_dir, k_count));
  write_manifest(cfg, "test");
  const RolloutResult r = run_rollout(cfg.env, default_test_seed(cfg.seed), phases, policy, cfg.test_episodes,
                                      cfg.power.base.steps, "proposed", true);
  const fs::path out(cfg.out_dir);
  power_episode_table(k_count, r.episodes).save(out / files::kTestEpisodes);
  step_table(k_count, r.steps).save(out / files::kTestSteps);
  if (log != nullptr)
    *log << "test mean r_global "
         << mean_of(r.episodes, [](const PowerEpisodeMetrics& m) { return m.r_global_mean; }) << '\n';
}

void cmd_baseline(const ExperimentConfig& cfg, const std::optional<fs::path>& phase_ckpt, std::ostream* log) {
  cfg.validate();
  const std::string kind(to_string(cfg.baseline));
  std::optional<PhasePolicy> phase;
  if (needs_phase_policy(cfg.baseline)) {
    if (!phase_ckpt) throw ConfigError(kind + " requires --phase-ckpt");
    phase.emplace(load_compatible_phase_policy(*phase_ckpt, cfg.env));
  }
  write_manifest(cfg, "baseline " + kind);
  const Progress progress(log, kind, cfg.power.base.episodes);
  const SchemeResult r = run_baseline(cfg.baseline, cfg.env, cfg.power, cfg.td3, phase ? &*phase : nullptr,
                                      scheme_options(cfg, true, progress));
  const fs::path out(cfg.out_dir);
  const int k_count = cfg.env.num_vehicles();
  power_episode_table(k_count, r.training).save(out / (kind + "_episodes.csv"));
  power_episode_table(k_count, r.test.episodes).save(out / (kind + "_test_episodes.csv"));
  step_table(k_count, r.test.steps).save(out / (kind + "_test_steps.csv"));
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, const std::string& variable, double value) {
  ExperimentConfig c = cfg;
  auto as_int = [&](double v) {
    if (v != std::floor(v)) throw ConfigError("sweep " + variable + " needs integer values");
    return static_cast<long long>(v);
  };
  if (variable == "eta") {
    c.env.arrival_rate_bps = value * 1e6;
  } else if (variable == "N") {
    c.env.ris_elements = static_cast<int>(as_int(value));
  } else if (variable == "K") {
    c.env.layout.num_vehicles = static_cast<int>(as_int(value));
    c.env.static_positions_x.clear();
  } else if (variable == "seed") {
    if (value < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(as_int(value));
  } else {
    throw ConfigError("unsupported sweep variable: " + variable + " (expected eta, N, K or seed)");
  }
  c.out_dir = (fs::path(cfg.out_dir) / (variable + "_" + value_label(value))).string();
  c.validate();
  return c;
}

std::vector<SweepPoint> cmd_sweep(const ExperimentConfig& cfg, const std::string& variable, std::vector<double> values,
                                  std::ostream* log) {
  cfg.validate();
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<ExperimentConfig> points;
  for (double v : values) points.push_back(apply_sweep_value(cfg, variable, v));

  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ExperimentConfig& c = points[i];
    if (log != nullptr) *log << "sweep " << variable << "=" << values[i] << '\n';
    cmd_train_phase(c, log);
    const PhasePolicy phase = load_compatible_phase_policy(fs::path(c.out_dir) / files::kPhaseCheckpoint, c.env);
    const SchemeResult r = run_proposed(c.env, c.power, phase, scheme_options(c, false, Progress(log, "power", c.power.base.episodes)));
    save_power_checkpoints(c.out_dir, *r.learner);
    power_episode_table(c.env.num_vehicles(), r.training).save(fs::path(c.out_dir) / files::kPowerEpisodes);
    power_episode_table(c.env.num_vehicles(), r.test.episodes).save(fs::path(c.out_dir) / files::kTestEpisodes);

    SweepPoint p;
    p.value = values[i];
    p.scheme = r.scheme;
    p.train_final_r_global = r.training.empty() ? 0.0 : r.training.back().r_global_mean;
    p.test_r_global_mean = mean_of(r.test.episodes, [](const PowerEpisodeMetrics& m) { return m.r_global_mean; });
    p.test_power_per_vu = mean_of(r.test.episodes, [](const PowerEpisodeMetrics& m) { return m.power_per_vu(); });
    p.test_queue_bits_mean = mean_of(r.test.episodes, [](const PowerEpisodeMetrics& m) { return m.queue_bits_mean; });
    out.push_back(p);
  }
  fs::create_directories(cfg.out_dir);
  sweep_table(variable, out).save(fs::path(cfg.out_dir) / files::kSweep);
  return out;
}

}  // namespace risvec
