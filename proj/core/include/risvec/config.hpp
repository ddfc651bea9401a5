#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "risvec/baselines.hpp"
#include "risvec/ddpg.hpp"
#include "risvec/env.hpp"
#include "risvec/maddpg.hpp"

namespace risvec {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingFileError : public std::runtime_error {
 public:
  explicit MissingFileError(const std::filesystem::path& path)
      : std::runtime_error("file not found: " + path.string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "runs/default";
  BaselineKind baseline = BaselineKind::kCentralizedDdpg;
  int test_episodes = 10;

  EnvConfig env;
  DdpgConfig phase;     // stage one
  MaddpgConfig power;   // stage two, also the baselines' learners
  Td3Config td3;

  void validate() const;
  // Overrides the episode count of both training stages.
  void set_episodes(int episodes);

  static ExperimentConfig reference();
  // K=4, N=16, S=50, narrower networks; 300 phase and 1000 power episodes.
  static ExperimentConfig desk();

  bool operator==(const ExperimentConfig& o) const;
};

// Keys absent from the text keep the defaults of `base`; unknown keys and
// type mismatches raise ConfigError. The result is validated.
ExperimentConfig parse_config(const std::string& json_text, const ExperimentConfig& base = ExperimentConfig::reference());
ExperimentConfig load_config(const std::filesystem::path& path,
                             const ExperimentConfig& base = ExperimentConfig::reference());
// Every key, pretty-printed; parse_config(dump_config(c)) == c.
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace risvec
