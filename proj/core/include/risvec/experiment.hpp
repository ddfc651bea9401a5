#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "risvec/config.hpp"
#include "risvec/csv.hpp"

namespace risvec {

// File names inside an output directory.
namespace files {
inline constexpr const char* kPhaseCheckpoint = "phase.ckpt";
inline constexpr const char* kPhaseEpisodes = "phase_episodes.csv";
inline constexpr const char* kPowerEpisodes = "power_episodes.csv";
inline constexpr const char* kTestEpisodes = "test_episodes.csv";
inline constexpr const char* kTestSteps = "test_steps.csv";
inline constexpr const char* kSweep = "sweep.csv";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace files

// Throws MissingFileError when `path` is not a regular file.
void require_file(const std::filesystem::path& path);

// Loads a phase checkpoint and checks it matches the scenario dimensions.
PhasePolicy load_compatible_phase_policy(const std::filesystem::path& path, const EnvConfig& env);

// `log` receives progress lines; pass nullptr for silence.
void cmd_train_phase(const ExperimentConfig& cfg, std::ostream* log = nullptr);

void cmd_train_power(const ExperimentConfig& cfg, const std::filesystem::path& phase_ckpt,
                     std::ostream* log = nullptr);

// Greedy rollout of frozen checkpoints; reads them and nothing else.
void cmd_test(const ExperimentConfig& cfg, const std::filesystem::path& phase_ckpt,
              const std::filesystem::path& power_dir, std::ostream* log = nullptr);

// Writes <kind>_episodes.csv (training, empty for heuristics),
// <kind>_test_episodes.csv and <kind>_test_steps.csv.
void cmd_baseline(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& phase_ckpt,
                  std::ostream* log = nullptr);

// variable in {eta, N, K, seed}; eta values are in Mbit/s. Each point
// trains both stages and tests under <out>/<variable>_<value>/, then the
// aggregated table is written sorted by value.
std::vector<SweepPoint> cmd_sweep(const ExperimentConfig& cfg, const std::string& variable,
                                  std::vector<double> values, std::ostream* log = nullptr);

// Returns a copy of cfg with the swept variable set.
ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, const std::string& variable, double value);

}  // namespace risvec
