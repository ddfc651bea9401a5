#include "risvec/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "risvec/checkpoint.hpp"

namespace risvec {

double NoiseSchedule::std_at(int episode) const {
  return std::max(floor, initial * std::pow(decay, episode));
}

void DdpgConfig::validate() const {
  if (!(lr_actor > 0.0) || !(lr_critic > 0.0)) throw std::invalid_argument("learning rates must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0,1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0,1]");
  if (batch_size < 1 || episodes < 1 || steps < 1) throw std::invalid_argument("batch/episodes/steps must be >= 1");
  if (buffer_capacity <= static_cast<std::size_t>(batch_size))
    throw std::invalid_argument("buffer capacity must exceed the batch size");
  if (noise.initial < 0.0 || noise.floor < 0.0 || noise.decay <= 0.0)
    throw std::invalid_argument("noise schedule must be non-negative");
  for (int h : actor_hidden)
    if (h <= 0) throw std::invalid_argument("hidden sizes must be positive");
  for (int h : critic_hidden)
    if (h <= 0) throw std::invalid_argument("hidden sizes must be positive");
}

ActorCritic ActorCritic::create(int state_dim, int action_dim, OutputActivation actor_output,
                                const DdpgConfig& cfg, Rng& init_rng) {
  ActorCritic ac;
  ac.actor = Mlp(MlpSpec::make(state_dim, cfg.actor_hidden, action_dim, actor_output), init_rng);
  ac.critic = Mlp(MlpSpec::make(state_dim + action_dim, cfg.critic_hidden, 1, OutputActivation::kIdentity),
                  init_rng);
  ac.target_actor = ac.actor;
  ac.target_critic = ac.critic;
  ac.actor_opt = AdamState::for_params(ac.actor.params(), cfg.lr_actor);
  ac.critic_opt = AdamState::for_params(ac.critic.params(), cfg.lr_critic);
  return ac;
}

void ActorCritic::soft_update_targets(double tau) {
  soft_update(target_actor.params(), actor.params(), tau);
  soft_update(target_critic.params(), critic.params(), tau);
}

bool ActorCritic::all_finite() const {
  return actor.params().all_finite() && critic.params().all_finite() &&
         target_actor.params().all_finite() && target_critic.params().all_finite();
}

Eigen::MatrixXd stack_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
  if (top.cols() != bottom.cols()) throw std::invalid_argument("stack_rows: column mismatch");
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

Eigen::VectorXd select_action(const Mlp& actor, const Eigen::VectorXd& state, double noise_std, Rng& rng) {
  Eigen::VectorXd a = actor(state);
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] += noise(rng);
  }
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

PhaseConfig quantize_phases(const Eigen::VectorXd& raw, int bits) {
  const int top = (1 << bits) - 1;
  PhaseConfig cfg = PhaseConfig::uniform(static_cast<int>(raw.size()), bits);
  for (Eigen::Index n = 0; n < raw.size(); ++n) {
    const double x = std::clamp(raw[n], -1.0, 1.0);
    const auto idx = static_cast<int>(std::round((x + 1.0) / 2.0 * top));
    cfg.indices[static_cast<std::size_t>(n)] = std::clamp(idx, 0, top);
  }
  return cfg;
}

double critic_update(ActorCritic& ac, const Batch& batch, double gamma, double grad_clip) {
  const double b = static_cast<double>(batch.size());
  const Eigen::MatrixXd next_actions = ac.target_actor.forward(batch.next_states);
  const Eigen::RowVectorXd next_q = ac.target_critic.forward(stack_rows(batch.next_states, next_actions));
  const Eigen::RowVectorXd y = batch.rewards_global + gamma * next_q;

  ForwardCache cache;
  const Eigen::RowVectorXd q = ac.critic.forward(stack_rows(batch.states, batch.actions), &cache);
  const Eigen::RowVectorXd err = q - y;
  ParameterSet grads;
  ac.critic.backward(cache, (2.0 / b) * err, grads);
  clip_global_norm(grads, grad_clip);
  adam_step(ac.critic.params(), grads, ac.critic_opt);
  return err.squaredNorm() / b;
}

Eigen::MatrixXd critic_input_gradient(const Mlp& critic, const Eigen::MatrixXd& input, Eigen::Index row0,
                                      Eigen::Index rows) {
  ForwardCache cache;
  critic.forward(input, &cache);
  ParameterSet scratch;
  const Eigen::MatrixXd g = critic.backward(cache, Eigen::RowVectorXd::Ones(input.cols()), scratch);
  return g.middleRows(row0, rows);
}

void actor_update(ActorCritic& ac, const Batch& batch, double grad_clip) {
  const double b = static_cast<double>(batch.size());
  ForwardCache actor_cache;
  const Eigen::MatrixXd actions = ac.actor.forward(batch.states, &actor_cache);
  const Eigen::MatrixXd dq_da = critic_input_gradient(ac.critic, stack_rows(batch.states, actions),
                                                      batch.states.rows(), actions.rows());
  ParameterSet grads;
  ac.actor.backward(actor_cache, -dq_da / b, grads);
  clip_global_norm(grads, grad_clip);
  adam_step(ac.actor.params(), grads, ac.actor_opt);
}

PhaseTrainingResult train_phase_agent(const EnvConfig& env_cfg, const DdpgConfig& cfg, std::uint64_t seed,
                                      const PhaseEpisodeCallback& on_episode) {
  env_cfg.validate();
  cfg.validate();
  VecEnv env(env_cfg, seed);
  Rng init_rng = make_rng(seed, Stream::kInit);
  Rng explore_rng = make_rng(seed, Stream::kExploration);
  Rng replay_rng = make_rng(seed, Stream::kReplay);

  const int state_dim = env_cfg.ris_state_dim();
  const int action_dim = env_cfg.ris_elements;
  PhaseTrainingResult result{ActorCritic::create(state_dim, action_dim, OutputActivation::kTanh, cfg, init_rng), {}};
  auto& nets = result.nets;
  ReplayBuffer buffer(cfg.buffer_capacity, state_dim, action_dim, 1);
  const std::vector<PowerAction> powers(static_cast<std::size_t>(env_cfg.num_vehicles()),
                                        PowerAction{env_cfg.p_max_offload, 0.0});
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    env.reset();
    const double noise_std = cfg.noise.std_at(episode);
    Eigen::VectorXd state = env.ris_state();
    double reward_sum = 0.0;
    double rate_sum = 0.0;
    int steps = 0;
    for (int t = 0; t < cfg.steps; ++t, ++steps) {
      const Eigen::VectorXd raw = select_action(nets.actor, state, noise_std, explore_rng);
      const StepOutcome out = env.step(quantize_phases(raw, env_cfg.phase_bits), powers);
      Eigen::VectorXd next_state = env.ris_state();
      buffer.push({state, raw, {out.r_ris}, out.r_ris, next_state});
      reward_sum += out.r_ris;
      for (double g : out.snr) rate_sum += env_cfg.fading.bandwidth * std::log2(1.0 + g);
      state = std::move(next_state);

      if (buffer.ready(batch_size)) {
        const Batch batch = buffer.sample_batch(batch_size, replay_rng);
        critic_update(nets, batch, cfg.gamma, cfg.grad_clip);
        actor_update(nets, batch, cfg.grad_clip);
        nets.soft_update_targets(cfg.tau);
      }
    }
    PhaseEpisodeMetrics m;
    m.episode = episode;
    m.steps = steps;
    m.mean_ris_reward = reward_sum / cfg.steps;
    m.mean_rate_bps = rate_sum / (static_cast<double>(cfg.steps) * env_cfg.num_vehicles());
    m.noise_std = noise_std;
    result.history.push_back(m);
    if (on_episode) on_episode(m);
  }
  return result;
}

PhasePolicy::PhasePolicy(Mlp actor, int bits) : actor_(std::move(actor)), bits_(bits) {
  if (actor_.spec().output != OutputActivation::kTanh)
    throw std::invalid_argument("phase actor must have a tanh output");
}

PhaseConfig PhasePolicy::act(const Eigen::VectorXd& ris_state) const {
  return quantize_phases(actor_(ris_state), bits_);
}

void save_phase_checkpoint(const std::filesystem::path& path, const ActorCritic& nets, const EnvConfig& env_cfg) {
  Checkpoint c;
  c.set_meta("kind", "phase");
  c.set_meta("ris_elements", std::to_string(env_cfg.ris_elements));
  c.set_meta("phase_bits", std::to_string(env_cfg.phase_bits));
  c.set_meta("num_vehicles", std::to_string(env_cfg.num_vehicles()));
  c.add_network("actor", nets.actor);
  c.add_network("critic", nets.critic);
  c.add_network("target_actor", nets.target_actor);
  c.add_network("target_critic", nets.target_critic);
  c.save(path);
}

PhasePolicy load_phase_policy(const std::filesystem::path& path) {
  const Checkpoint c = Checkpoint::load(path);
  if (c.meta("kind") != "phase") throw std::runtime_error(path.string() + " is not a phase checkpoint");
  return PhasePolicy(c.network("actor"), std::stoi(c.meta("phase_bits")));
}

}  // namespace risvec
