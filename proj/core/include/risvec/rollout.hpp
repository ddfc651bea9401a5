#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "risvec/ddpg.hpp"
#include "risvec/env.hpp"
#include "risvec/mlp.hpp"

namespace risvec {

// Where the RIS configuration of each slot comes from.
class PhaseController {
 public:
  static PhaseController from_policy(PhasePolicy policy);
  static PhaseController random(int elements, int bits, std::uint64_t seed);
  static PhaseController fixed(PhaseConfig cfg);

  PhaseConfig next(const VecEnv& env);
  bool is_random() const { return mode_ == Mode::kRandom; }

 private:
  enum class Mode { kPolicy, kRandom, kFixed };
  Mode mode_ = Mode::kFixed;
  std::optional<PhasePolicy> policy_;
  PhaseConfig fixed_;
  Rng rng_;
};

class PowerPolicy {
 public:
  virtual ~PowerPolicy() = default;
  virtual std::vector<PowerAction> act(const VecEnv& env) = 0;
};

// One frozen sigmoid actor per vehicle, each on its own 5-entry state.
class DecentralizedPowerPolicy final : public PowerPolicy {
 public:
  explicit DecentralizedPowerPolicy(std::vector<Mlp> actors);
  std::vector<PowerAction> act(const VecEnv& env) override;

 private:
  std::vector<Mlp> actors_;
};

// One frozen actor over the joint state emitting 2K outputs.
class CentralizedPowerPolicy final : public PowerPolicy {
 public:
  explicit CentralizedPowerPolicy(Mlp actor);
  std::vector<PowerAction> act(const VecEnv& env) override;

 private:
  Mlp actor_;
};

class MaxPowerPolicy final : public PowerPolicy {
 public:
  std::vector<PowerAction> act(const VecEnv& env) override;
};

// Uniform in (0, P_max] per component.
class RandomPowerPolicy final : public PowerPolicy {
 public:
  explicit RandomPowerPolicy(std::uint64_t seed);
  std::vector<PowerAction> act(const VecEnv& env) override;

 private:
  Rng rng_;
};

// Lower clamp on allocated powers; keeps the open-interval budget strict.
inline constexpr double kMinPower = 1e-6;

// Maps normalized outputs u in [0,1] to clamped powers.
PowerAction powers_from_unit(double u_offload, double u_local, const EnvConfig& cfg);

// Per-episode summary shared by the trainers, the baselines and testing.
struct PowerEpisodeMetrics {
  int episode = 0;
  std::string scheme;
  double r_global_mean = 0.0;
  std::vector<double> r_local_mean;
  std::vector<double> p_offload_mean;
  std::vector<double> p_local_mean;
  double queue_bits_mean = 0.0;  // buffer length q(t) averaged over slots and vehicles

  double power_per_vu() const;   // mean of p_o + p_l over vehicles
};

// Per-slot record emitted by the testing stage.
struct StepRow {
  int episode = 0;
  int step = 0;
  std::string scheme;
  std::vector<double> p_offload;
  std::vector<double> p_local;
  std::vector<double> queue_bits;
  std::vector<double> snr_db;
  std::vector<double> r_local;
  double r_global = 0.0;
};

class EpisodeAccumulator {
 public:
  EpisodeAccumulator(int num_vehicles, int episode, std::string scheme);
  void add(std::span<const PowerAction> actions, const StepOutcome& out);
  PowerEpisodeMetrics finish() const;

 private:
  PowerEpisodeMetrics m_;
  int steps_ = 0;
  double queue_sum_ = 0.0;
};

StepRow make_step_row(int episode, int step, const std::string& scheme,
                      std::span<const PowerAction> actions, const StepOutcome& out);

struct RolloutResult {
  std::vector<PowerEpisodeMetrics> episodes;
  std::vector<StepRow> steps;
};

// Testing stage: greedy policies, no parameter updates.
RolloutResult run_rollout(const EnvConfig& env_cfg, std::uint64_t env_seed, PhaseController& phases,
                          PowerPolicy& powers, int episodes, int steps, const std::string& scheme,
                          bool record_steps);

}  // namespace risvec
