#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "risvec/ddpg.hpp"
#include "risvec/rollout.hpp"

namespace risvec {

struct MaddpgConfig {
  DdpgConfig base;
  int delay = 2;  // local critics and actors learn on episodes with e % delay == 0
  void validate() const;
};

struct PowerChoice {
  PowerAction power;
  Eigen::Vector2d unit;  // normalized action stored in replay, in (0,1)
};

// Sigmoid of (pre-activation + N(0, noise_std^2)) per output.
Eigen::VectorXd noisy_sigmoid_action(const Mlp& actor, const Eigen::VectorXd& state, double noise_std, Rng& rng);

// Gaussian noise on the pre-sigmoid output, then scaled by P_max and clamped
// to [kMinPower, P_max].
PowerChoice select_powers(const Mlp& actor, const Eigen::VectorXd& state, double noise_std,
                          const EnvConfig& env_cfg, Rng& rng);

// y_g = r_g + gamma * min(q1', q2'), elementwise.
Eigen::RowVectorXd twin_min_target(const Eigen::RowVectorXd& r_global, double gamma,
                                   const Eigen::RowVectorXd& q1_next, const Eigen::RowVectorXd& q2_next);

struct GlobalCritics {
  std::array<Mlp, 2> online;
  std::array<Mlp, 2> target;
  std::array<AdamState, 2> opt;
};

// Joint layout: agent k owns state rows [5k, 5k+5) and action rows [2k, 2k+2).
class MaddpgLearner {
 public:
  MaddpgLearner(int num_agents, const MaddpgConfig& cfg, Rng& init_rng);

  int num_agents() const { return static_cast<int>(agents_.size()); }
  std::vector<ActorCritic>& agents() { return agents_; }
  const std::vector<ActorCritic>& agents() const { return agents_; }
  GlobalCritics& globals() { return globals_; }
  const GlobalCritics& globals() const { return globals_; }

  // Target actions of every agent on the next joint state.
  Eigen::MatrixXd target_joint_actions(const Eigen::MatrixXd& next_states) const;
  Eigen::RowVectorXd global_target(const Batch& batch) const;

  // Both twins regress on the same twin-min target. Returns the two losses.
  std::pair<double, double> global_critic_update(const Batch& batch);
  double local_critic_update(int k, const Batch& batch);
  // Sum of the global-critic (twin 1) and local-critic action gradients.
  void actor_update(int k, const Batch& batch, bool use_global = true, bool use_local = true);
  // Gradient w.r.t. actor k's parameters of the batch-mean objective that
  // actor_update ascends; exposed for verification.
  ParameterSet actor_objective_gradient(int k, const Batch& batch, bool use_global, bool use_local) const;

  void soft_update_globals();
  void soft_update_agent(int k);
  bool all_finite() const;

  static Eigen::MatrixXd agent_rows(const Eigen::MatrixXd& joint, int k, int width);

 private:
  MaddpgConfig cfg_;
  std::vector<ActorCritic> agents_;
  GlobalCritics globals_;
};

struct PowerTrainingResult {
  MaddpgLearner learner;
  std::vector<PowerEpisodeMetrics> history;
};

using PowerEpisodeCallback = std::function<void(const PowerEpisodeMetrics&)>;

// Stage two. Each slot the phase controller picks the RIS configuration,
// every agent acts on its own state, and the joint transition is stored.
// After each episode: `steps` global-critic steps, and on delayed episodes
// the same number of local-critic/actor steps.
PowerTrainingResult train_power_agents(const EnvConfig& env_cfg, const MaddpgConfig& cfg,
                                       PhaseController& phases, std::uint64_t seed,
                                       const std::string& scheme = "proposed",
                                       const PowerEpisodeCallback& on_episode = {});

std::filesystem::path actor_checkpoint_path(const std::filesystem::path& dir, int k);
void save_power_checkpoints(const std::filesystem::path& dir, const MaddpgLearner& learner);
std::vector<Mlp> load_power_actors(const std::filesystem::path& dir, int num_agents);

}  // namespace risvec
