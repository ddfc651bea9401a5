#include "risvec/maddpg.hpp"

#include <cmath>
#include <stdexcept>

#include "risvec/checkpoint.hpp"

namespace risvec {

namespace {
constexpr int kS = EnvConfig::kVuStateDim;
constexpr int kA = EnvConfig::kVuActionDim;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

void MaddpgConfig::validate() const {
  base.validate();
  if (delay < 1) throw std::invalid_argument("delay must be >= 1");
}

Eigen::VectorXd noisy_sigmoid_action(const Mlp& actor, const Eigen::VectorXd& state, double noise_std, Rng& rng) {
  if (actor.spec().output != OutputActivation::kSigmoid)
    throw std::invalid_argument("noisy_sigmoid_action: actor must have a sigmoid output");
  ForwardCache cache;
  actor.forward(state, &cache);
  Eigen::VectorXd raw = cache.output_preactivation().col(0);
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (auto& v : raw) v += noise(rng);
  }
  return raw.unaryExpr([](double z) { return sigmoid(z); });
}

PowerChoice select_powers(const Mlp& actor, const Eigen::VectorXd& state, double noise_std,
                          const EnvConfig& env_cfg, Rng& rng) {
  if (state.size() != kS) throw std::invalid_argument("select_powers: state must have 5 entries");
  if (actor.spec().output_size() != kA) throw std::invalid_argument("select_powers: actor must emit 2 outputs");
  PowerChoice c;
  c.unit = noisy_sigmoid_action(actor, state, noise_std, rng);
  c.power = powers_from_unit(c.unit[0], c.unit[1], env_cfg);
  return c;
}

Eigen::RowVectorXd twin_min_target(const Eigen::RowVectorXd& r_global, double gamma,
                                   const Eigen::RowVectorXd& q1_next, const Eigen::RowVectorXd& q2_next) {
  return r_global + gamma * q1_next.cwiseMin(q2_next);
}

Eigen::MatrixXd MaddpgLearner::agent_rows(const Eigen::MatrixXd& joint, int k, int width) {
  return joint.middleRows(static_cast<Eigen::Index>(k) * width, width);
}

MaddpgLearner::MaddpgLearner(int num_agents, const MaddpgConfig& cfg, Rng& init_rng) : cfg_(cfg) {
  cfg_.validate();
  if (num_agents < 1) throw std::invalid_argument("need at least one agent");
  for (int k = 0; k < num_agents; ++k)
    agents_.push_back(ActorCritic::create(kS, kA, OutputActivation::kSigmoid, cfg_.base, init_rng));
  const int joint_in = num_agents * (kS + kA);
  for (std::size_t j = 0; j < 2; ++j) {
    globals_.online[j] = Mlp(MlpSpec::make(joint_in, cfg_.base.critic_hidden, 1, OutputActivation::kIdentity),
                             init_rng);
    globals_.target[j] = globals_.online[j];
    globals_.opt[j] = AdamState::for_params(globals_.online[j].params(), cfg_.base.lr_critic);
  }
}

Eigen::MatrixXd MaddpgLearner::target_joint_actions(const Eigen::MatrixXd& next_states) const {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(num_agents()) * kA, next_states.cols());
  for (int k = 0; k < num_agents(); ++k)
    a.middleRows(k * kA, kA) = agents_[static_cast<std::size_t>(k)].target_actor.forward(agent_rows(next_states, k, kS));
  return a;
}

Eigen::RowVectorXd MaddpgLearner::global_target(const Batch& batch) const {
  const Eigen::MatrixXd next_in = stack_rows(batch.next_states, target_joint_actions(batch.next_states));
  const Eigen::RowVectorXd q1 = globals_.target[0].forward(next_in);
  const Eigen::RowVectorXd q2 = globals_.target[1].forward(next_in);
  return twin_min_target(batch.rewards_global, cfg_.base.gamma, q1, q2);
}

std::pair<double, double> MaddpgLearner::global_critic_update(const Batch& batch) {
  const double b = static_cast<double>(batch.size());
  const Eigen::RowVectorXd y = global_target(batch);
  const Eigen::MatrixXd input = stack_rows(batch.states, batch.actions);
  std::array<double, 2> losses{};
  for (std::size_t j = 0; j < 2; ++j) {
    ForwardCache cache;
    const Eigen::RowVectorXd q = globals_.online[j].forward(input, &cache);
    const Eigen::RowVectorXd err = q - y;
    ParameterSet grads;
    globals_.online[j].backward(cache, (2.0 / b) * err, grads);
    clip_global_norm(grads, cfg_.base.grad_clip);
    adam_step(globals_.online[j].params(), grads, globals_.opt[j]);
    losses[j] = err.squaredNorm() / b;
  }
  return {losses[0], losses[1]};
}

double MaddpgLearner::local_critic_update(int k, const Batch& batch) {
  auto& agent = agents_.at(static_cast<std::size_t>(k));
  const double b = static_cast<double>(batch.size());
  const Eigen::MatrixXd s = agent_rows(batch.states, k, kS);
  const Eigen::MatrixXd a = agent_rows(batch.actions, k, kA);
  const Eigen::MatrixXd s2 = agent_rows(batch.next_states, k, kS);
  const Eigen::RowVectorXd q_next = agent.target_critic.forward(stack_rows(s2, agent.target_actor.forward(s2)));
  const Eigen::RowVectorXd y = batch.rewards_local.row(k) + cfg_.base.gamma * q_next;

  ForwardCache cache;
  const Eigen::RowVectorXd q = agent.critic.forward(stack_rows(s, a), &cache);
  const Eigen::RowVectorXd err = q - y;
  ParameterSet grads;
  agent.critic.backward(cache, (2.0 / b) * err, grads);
  clip_global_norm(grads, cfg_.base.grad_clip);
  adam_step(agent.critic.params(), grads, agent.critic_opt);
  return err.squaredNorm() / b;
}

ParameterSet MaddpgLearner::actor_objective_gradient(int k, const Batch& batch, bool use_global,
                                                     bool use_local) const {
  const auto& agent = agents_.at(static_cast<std::size_t>(k));
  const double b = static_cast<double>(batch.size());
  const Eigen::MatrixXd s = agent_rows(batch.states, k, kS);
  ForwardCache actor_cache;
  const Eigen::MatrixXd u = agent.actor.forward(s, &actor_cache);

  Eigen::MatrixXd dq_da = Eigen::MatrixXd::Zero(kA, batch.size());
  if (use_global) {
    Eigen::MatrixXd joint_actions = batch.actions;
    joint_actions.middleRows(k * kA, kA) = u;
    dq_da += critic_input_gradient(globals_.online[0], stack_rows(batch.states, joint_actions),
                                   batch.states.rows() + static_cast<Eigen::Index>(k) * kA, kA);
  }
  if (use_local) dq_da += critic_input_gradient(agent.critic, stack_rows(s, u), kS, kA);

  ParameterSet grads;
  agent.actor.backward(actor_cache, dq_da / b, grads);
  return grads;
}

void MaddpgLearner::actor_update(int k, const Batch& batch, bool use_global, bool use_local) {
  ParameterSet grads = actor_objective_gradient(k, batch, use_global, use_local);
  grads.scale(-1.0);  // ascent on the objective
  clip_global_norm(grads, cfg_.base.grad_clip);
  auto& agent = agents_.at(static_cast<std::size_t>(k));
  adam_step(agent.actor.params(), grads, agent.actor_opt);
}

void MaddpgLearner::soft_update_globals() {
  for (std::size_t j = 0; j < 2; ++j) soft_update(globals_.target[j].params(), globals_.online[j].params(), cfg_.base.tau);
}

void MaddpgLearner::soft_update_agent(int k) {
  agents_.at(static_cast<std::size_t>(k)).soft_update_targets(cfg_.base.tau);
}

bool MaddpgLearner::all_finite() const {
  for (const auto& a : agents_)
    if (!a.all_finite()) return false;
  for (std::size_t j = 0; j < 2; ++j)
    if (!globals_.online[j].params().all_finite() || !globals_.target[j].params().all_finite()) return false;
  return true;
}

PowerTrainingResult train_power_agents(const EnvConfig& env_cfg, const MaddpgConfig& cfg,
                                       PhaseController& phases, std::uint64_t seed, const std::string& scheme,
                                       const PowerEpisodeCallback& on_episode) {
  env_cfg.validate();
  cfg.validate();
  VecEnv env(env_cfg, seed);
  Rng init_rng = make_rng(seed, Stream::kInit);
  Rng explore_rng = make_rng(seed, Stream::kExploration);
  Rng replay_rng = make_rng(seed, Stream::kReplay);
  const int k_count = env_cfg.num_vehicles();
  PowerTrainingResult result{MaddpgLearner(k_count, cfg, init_rng), {}};
  auto& learner = result.learner;
  ReplayBuffer buffer(cfg.base.buffer_capacity, k_count * kS, k_count * kA, k_count);
  const auto batch_size = static_cast<std::size_t>(cfg.base.batch_size);

  for (int episode = 1; episode <= cfg.base.episodes; ++episode) {
    env.reset();
    const double noise_std = cfg.base.noise.std_at(episode - 1);
    EpisodeAccumulator acc(k_count, episode - 1, scheme);
    Eigen::VectorXd state = env.joint_vu_state();
    for (int t = 0; t < cfg.base.steps; ++t) {
      const PhaseConfig ris = phases.next(env);
      std::vector<PowerAction> actions;
      Eigen::VectorXd joint_action(k_count * kA);
      for (int k = 0; k < k_count; ++k) {
        const PowerChoice c = select_powers(learner.agents()[static_cast<std::size_t>(k)].actor,
                                            state.segment(k * kS, kS), noise_std, env_cfg, explore_rng);
        actions.push_back(c.power);
        joint_action.segment(k * kA, kA) = c.unit;
      }
      const StepOutcome out = env.step(ris, actions);
      Eigen::VectorXd next_state = env.joint_vu_state();
      buffer.push({state, joint_action, out.r_local, out.r_global, next_state});
      acc.add(actions, out);
      state = std::move(next_state);
    }

    if (buffer.ready(batch_size)) {
      const bool delayed = episode % cfg.delay == 0;
      for (int i = 0; i < cfg.base.steps; ++i) {
        const Batch batch = buffer.sample_batch(batch_size, replay_rng);
        learner.global_critic_update(batch);
        learner.soft_update_globals();
        if (!delayed) continue;
        for (int k = 0; k < k_count; ++k) {
          learner.local_critic_update(k, batch);
          learner.actor_update(k, batch);
          learner.soft_update_agent(k);
        }
      }
    }
    result.history.push_back(acc.finish());
    if (on_episode) on_episode(result.history.back());
  }
  return result;
}

std::filesystem::path actor_checkpoint_path(const std::filesystem::path& dir, int k) {
  return dir / ("power_actor_" + std::to_string(k) + ".ckpt");
}

void save_power_checkpoints(const std::filesystem::path& dir, const MaddpgLearner& learner) {
  for (int k = 0; k < learner.num_agents(); ++k) {
    Checkpoint c;
    c.set_meta("kind", "power_actor");
    c.set_meta("agent", std::to_string(k));
    c.add_network("actor", learner.agents()[static_cast<std::size_t>(k)].actor);
    c.add_network("target_actor", learner.agents()[static_cast<std::size_t>(k)].target_actor);
    c.save(actor_checkpoint_path(dir, k));
  }
  Checkpoint critics;
  critics.set_meta("kind", "power_critics");
  critics.set_meta("num_agents", std::to_string(learner.num_agents()));
  for (std::size_t j = 0; j < 2; ++j) {
    critics.add_network("global" + std::to_string(j + 1), learner.globals().online[j]);
    critics.add_network("target_global" + std::to_string(j + 1), learner.globals().target[j]);
  }
  for (int k = 0; k < learner.num_agents(); ++k) {
    critics.add_network("local" + std::to_string(k), learner.agents()[static_cast<std::size_t>(k)].critic);
    critics.add_network("target_local" + std::to_string(k),
                        learner.agents()[static_cast<std::size_t>(k)].target_critic);
  }
  critics.save(dir / "power_critics.ckpt");
}

std::vector<Mlp> load_power_actors(const std::filesystem::path& dir, int num_agents) {
  std::vector<Mlp> actors;
  for (int k = 0; k < num_agents; ++k) {
    const Checkpoint c = Checkpoint::load(actor_checkpoint_path(dir, k));
    if (c.meta("kind") != "power_actor") throw std::runtime_error("not a power actor checkpoint");
    actors.push_back(c.network("actor"));
  }
  return actors;
}

}  // namespace risvec
