#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "risvec/ddpg.hpp"
#include "risvec/maddpg.hpp"
#include "risvec/rollout.hpp"

namespace risvec {

enum class BaselineKind { kCentralizedDdpg, kCentralizedTd3, kRandomPhase, kNoRis, kMaxPower, kRandomPower };

std::string_view to_string(BaselineKind k);
BaselineKind parse_baseline_kind(std::string_view name);
const std::vector<BaselineKind>& all_baseline_kinds();

// Schemes that act under the trained phase policy.
bool needs_phase_policy(BaselineKind k);
// Schemes with a learned power policy.
bool is_learned(BaselineKind k);

struct Td3Config {
  double target_noise = 0.2;
  double noise_clip = 0.5;
  int policy_delay = 2;
  void validate() const;
};

// Single agent over the concatenated K*5 state with 2K sigmoid outputs,
// trained on r_global with one update per environment step. Passing td3
// adds a twin critic, target smoothing and a delayed actor.
struct CentralizedTrainingResult {
  ActorCritic nets;
  std::optional<Mlp> critic2;
  std::vector<PowerEpisodeMetrics> history;
};

CentralizedTrainingResult train_centralized(const EnvConfig& env_cfg, const DdpgConfig& cfg,
                                            const std::optional<Td3Config>& td3, PhaseController& phases,
                                            std::uint64_t seed, const std::string& scheme,
                                            const PowerEpisodeCallback& on_episode = {});

struct SchemeOptions {
  std::uint64_t seed = 0;
  std::uint64_t test_seed = 0;  // environment seed of the testing stage
  int test_episodes = 10;
  bool record_steps = false;
  PowerEpisodeCallback on_episode;
};

// Deterministic seed for the testing environment, shared by all schemes.
std::uint64_t default_test_seed(std::uint64_t seed);

// Training history (empty for heuristics), the frozen power policy, and
// its noise-free test rollout.
struct SchemeResult {
  std::string scheme;
  std::vector<PowerEpisodeMetrics> training;
  RolloutResult test;
  std::optional<MaddpgLearner> learner;
  std::optional<Mlp> central_actor;
};

SchemeResult run_proposed(const EnvConfig& env_cfg, const MaddpgConfig& cfg, const PhasePolicy& phase,
                          const SchemeOptions& opts);

// Throws std::invalid_argument when a phase policy is required but absent.
SchemeResult run_baseline(BaselineKind kind, const EnvConfig& env_cfg, const MaddpgConfig& cfg,
                          const Td3Config& td3, const PhasePolicy* phase, const SchemeOptions& opts);

}  // namespace risvec
