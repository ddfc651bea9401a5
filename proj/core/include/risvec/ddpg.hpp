#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "risvec/adam.hpp"
#include "risvec/channel.hpp"
#include "risvec/env.hpp"
#include "risvec/mlp.hpp"
#include "risvec/replay.hpp"
#include "risvec/rng.hpp"

namespace risvec {

// Gaussian exploration std: initial * decay^episode, floored.
struct NoiseSchedule {
  double initial = 0.3;
  double decay = 0.999;
  double floor = 0.01;
  double std_at(int episode) const;
};

struct DdpgConfig {
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  double gamma = 0.99;
  double tau = 0.005;
  int batch_size = 64;
  int episodes = 1000;
  int steps = 100;
  std::size_t buffer_capacity = 1'000'000;
  double grad_clip = 1.0;
  NoiseSchedule noise;
  std::vector<int> actor_hidden{512, 256};
  std::vector<int> critic_hidden{1024, 512, 256};

  void validate() const;
};

// Online actor/critic with target copies and their optimizers.
struct ActorCritic {
  Mlp actor;
  Mlp critic;
  Mlp target_actor;
  Mlp target_critic;
  AdamState actor_opt;
  AdamState critic_opt;

  static ActorCritic create(int state_dim, int action_dim, OutputActivation actor_output,
                            const DdpgConfig& cfg, Rng& init_rng);
  void soft_update_targets(double tau);
  bool all_finite() const;
};

// [states; actions] stacked row-wise, one column per sample.
Eigen::MatrixXd stack_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom);

// mu(s) + N(0, noise_std^2), clipped to [-1, 1]. For tanh actors.
Eigen::VectorXd select_action(const Mlp& actor, const Eigen::VectorXd& state, double noise_std, Rng& rng);

// index = round((raw + 1) / 2 * (2^b - 1)), halves away from zero.
PhaseConfig quantize_phases(const Eigen::VectorXd& raw, int bits);

// y = r + gamma * Q'(s', mu'(s')) using rewards_global; one Adam step on
// the critic. Returns the pre-update mean squared TD error.
double critic_update(ActorCritic& ac, const Batch& batch, double gamma, double grad_clip);

// Ascends mean Q(s, mu(s)) with one Adam step on the actor.
void actor_update(ActorCritic& ac, const Batch& batch, double grad_clip);

// dQ/d(input) rows [row0, row0 + rows) for a single-output critic.
Eigen::MatrixXd critic_input_gradient(const Mlp& critic, const Eigen::MatrixXd& input, Eigen::Index row0,
                                      Eigen::Index rows);

struct PhaseEpisodeMetrics {
  int episode = 0;
  int steps = 0;
  double mean_ris_reward = 0.0;
  double mean_rate_bps = 0.0;
  double noise_std = 0.0;
};

struct PhaseTrainingResult {
  ActorCritic nets;
  std::vector<PhaseEpisodeMetrics> history;
};

using PhaseEpisodeCallback = std::function<void(const PhaseEpisodeMetrics&)>;

// Stage one: offload power pinned at P_max_o, local power 0; the reward is
// w * mean log2(1 + snr). Learning starts once the buffer holds more than a
// batch and runs once per environment step.
PhaseTrainingResult train_phase_agent(const EnvConfig& env_cfg, const DdpgConfig& cfg,
                                      std::uint64_t seed, const PhaseEpisodeCallback& on_episode = {});

// Frozen, noise-free phase actor.
class PhasePolicy {
 public:
  PhasePolicy(Mlp actor, int bits);

  PhaseConfig act(const Eigen::VectorXd& ris_state) const;
  const Mlp& actor() const { return actor_; }
  int bits() const { return bits_; }

 private:
  Mlp actor_;
  int bits_;
};

void save_phase_checkpoint(const std::filesystem::path& path, const ActorCritic& nets,
                           const EnvConfig& env_cfg);
PhasePolicy load_phase_policy(const std::filesystem::path& path);

}  // namespace risvec
