#include "risvec/baselines.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace risvec {

namespace {

struct KindName {
  BaselineKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 6> kKindNames{{
    {BaselineKind::kCentralizedDdpg, "centralized-ddpg"},
    {BaselineKind::kCentralizedTd3, "centralized-td3"},
    {BaselineKind::kRandomPhase, "random-phase"},
    {BaselineKind::kNoRis, "no-ris"},
    {BaselineKind::kMaxPower, "max-power"},
    {BaselineKind::kRandomPower, "random-power"},
}};

constexpr std::uint64_t kTestSalt = 0x7E57;

std::vector<PowerAction> units_to_powers(const Eigen::VectorXd& u, const EnvConfig& cfg) {
  std::vector<PowerAction> out;
  for (Eigen::Index k = 0; k < u.size() / 2; ++k) out.push_back(powers_from_unit(u[2 * k], u[2 * k + 1], cfg));
  return out;
}

// Clipped double-Q critic step for both twins; returns nothing, losses are
// not reported for the baseline.
void td3_critic_update(ActorCritic& ac, Mlp& critic2, Mlp& target_critic2, AdamState& opt2, const Batch& batch,
                       const DdpgConfig& cfg, const Td3Config& td3, Rng& rng) {
  const double b = static_cast<double>(batch.size());
  Eigen::MatrixXd a_next = ac.target_actor.forward(batch.next_states);
  std::normal_distribution<double> noise(0.0, td3.target_noise);
  for (auto& v : a_next.reshaped())
    v = std::clamp(v + std::clamp(noise(rng), -td3.noise_clip, td3.noise_clip), 0.0, 1.0);
  const Eigen::MatrixXd next_in = stack_rows(batch.next_states, a_next);
  const Eigen::RowVectorXd y =
      twin_min_target(batch.rewards_global, cfg.gamma, ac.target_critic.forward(next_in), target_critic2.forward(next_in));
  const Eigen::MatrixXd input = stack_rows(batch.states, batch.actions);
  for (auto [net, opt] : {std::pair<Mlp*, AdamState*>{&ac.critic, &ac.critic_opt}, {&critic2, &opt2}}) {
    ForwardCache cache;
    const Eigen::RowVectorXd err = net->forward(input, &cache) - y;
    ParameterSet grads;
    net->backward(cache, (2.0 / b) * err, grads);
    clip_global_norm(grads, cfg.grad_clip);
    adam_step(net->params(), grads, *opt);
  }
}

SchemeResult finish_learned(std::string scheme, std::vector<PowerEpisodeMetrics> training, const EnvConfig& env_cfg,
                            PhaseController& phases, PowerPolicy& policy, int steps, const SchemeOptions& opts) {
  SchemeResult r;
  r.scheme = std::move(scheme);
  r.training = std::move(training);
  r.test = run_rollout(env_cfg, opts.test_seed, phases, policy, opts.test_episodes, steps, r.scheme, opts.record_steps);
  return r;
}

}  // namespace

std::string_view to_string(BaselineKind k) {
  for (const auto& kn : kKindNames)
    if (kn.kind == k) return kn.name;
  throw std::invalid_argument("unknown baseline kind");
}

BaselineKind parse_baseline_kind(std::string_view name) {
  for (const auto& kn : kKindNames)
    if (kn.name == name) return kn.kind;
  throw std::invalid_argument("unknown baseline kind: " + std::string(name));
}

const std::vector<BaselineKind>& all_baseline_kinds() {
  static const std::vector<BaselineKind> kinds = [] {
    std::vector<BaselineKind> v;
    for (const auto& kn : kKindNames) v.push_back(kn.kind);
    return v;
  }();
  return kinds;
}

bool needs_phase_policy(BaselineKind k) { return k != BaselineKind::kRandomPhase && k != BaselineKind::kNoRis; }

bool is_learned(BaselineKind k) { return k != BaselineKind::kMaxPower && k != BaselineKind::kRandomPower; }

void Td3Config::validate() const {
  if (target_noise < 0.0 || noise_clip < 0.0) throw std::invalid_argument("td3 noise settings must be >= 0");
  if (policy_delay < 1) throw std::invalid_argument("td3 policy_delay must be >= 1");
}

std::uint64_t default_test_seed(std::uint64_t seed) { return split_seed(seed, 0, kTestSalt); }

CentralizedTrainingResult train_centralized(const EnvConfig& env_cfg, const DdpgConfig& cfg,
                                            const std::optional<Td3Config>& td3, PhaseController& phases,
                                            std::uint64_t seed, const std::string& scheme,
                                            const PowerEpisodeCallback& on_episode) {
  env_cfg.validate();
  cfg.validate();
  if (td3) td3->validate();
  VecEnv env(env_cfg, seed);
  Rng init_rng = make_rng(seed, Stream::kInit);
  Rng explore_rng = make_rng(seed, Stream::kExploration);
  Rng replay_rng = make_rng(seed, Stream::kReplay);
  const int k_count = env_cfg.num_vehicles();
  const int state_dim = k_count * EnvConfig::kVuStateDim;
  const int action_dim = k_count * EnvConfig::kVuActionDim;

  CentralizedTrainingResult result{
      ActorCritic::create(state_dim, action_dim, OutputActivation::kSigmoid, cfg, init_rng), std::nullopt, {}};
  auto& ac = result.nets;
  Mlp target_critic2;
  AdamState opt2;
  if (td3) {
    result.critic2 = Mlp(ac.critic.spec(), init_rng);
    target_critic2 = *result.critic2;
    opt2 = AdamState::for_params(result.critic2->params(), cfg.lr_critic);
  }
  ReplayBuffer buffer(cfg.buffer_capacity, state_dim, action_dim, k_count);
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  long updates = 0;

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    env.reset();
    const double noise_std = cfg.noise.std_at(episode);
    EpisodeAccumulator acc(k_count, episode, scheme);
    Eigen::VectorXd state = env.joint_vu_state();
    for (int t = 0; t < cfg.steps; ++t) {
      const PhaseConfig ris = phases.next(env);
      const Eigen::VectorXd u = noisy_sigmoid_action(ac.actor, state, noise_std, explore_rng);
      const std::vector<PowerAction> actions = units_to_powers(u, env_cfg);
      const StepOutcome out = env.step(ris, actions);
      Eigen::VectorXd next_state = env.joint_vu_state();
      buffer.push({state, u, out.r_local, out.r_global, next_state});
      acc.add(actions, out);
      state = std::move(next_state);

      if (!buffer.ready(batch_size)) continue;
      const Batch batch = buffer.sample_batch(batch_size, replay_rng);
      ++updates;
      if (!td3) {
        critic_update(ac, batch, cfg.gamma, cfg.grad_clip);
        actor_update(ac, batch, cfg.grad_clip);
        ac.soft_update_targets(cfg.tau);
        continue;
      }
      td3_critic_update(ac, *result.critic2, target_critic2, opt2, batch, cfg, *td3, replay_rng);
      if (updates % td3->policy_delay == 0) {
        actor_update(ac, batch, cfg.grad_clip);
        ac.soft_update_targets(cfg.tau);
        soft_update(target_critic2.params(), result.critic2->params(), cfg.tau);
      }
    }
    result.history.push_back(acc.finish());
    if (on_episode) on_episode(result.history.back());
  }
  return result;
}

SchemeResult run_proposed(const EnvConfig& env_cfg, const MaddpgConfig& cfg, const PhasePolicy& phase,
                          const SchemeOptions& opts) {
  PhaseController phases = PhaseController::from_policy(phase);
  PowerTrainingResult trained = train_power_agents(env_cfg, cfg, phases, opts.seed, "proposed", opts.on_episode);
  std::vector<Mlp> actors;
  for (const auto& a : trained.learner.agents()) actors.push_back(a.actor);
  DecentralizedPowerPolicy policy(std::move(actors));
  SchemeResult r = finish_learned("proposed", std::move(trained.history), env_cfg, phases, policy, cfg.base.steps, opts);
  r.learner.emplace(std::move(trained.learner));
  return r;
}

SchemeResult run_baseline(BaselineKind kind, const EnvConfig& env_cfg, const MaddpgConfig& cfg,
                          const Td3Config& td3, const PhasePolicy* phase, const SchemeOptions& opts) {
  const std::string scheme(to_string(kind));
  if (needs_phase_policy(kind) && phase == nullptr)
    throw std::invalid_argument(scheme + " requires a trained phase checkpoint");
  const int steps = cfg.base.steps;

  switch (kind) {
    case BaselineKind::kCentralizedDdpg:
    case BaselineKind::kCentralizedTd3: {
      PhaseController phases = PhaseController::from_policy(*phase);
      const std::optional<Td3Config> t =
          kind == BaselineKind::kCentralizedTd3 ? std::optional<Td3Config>(td3) : std::nullopt;
      CentralizedTrainingResult trained =
          train_centralized(env_cfg, cfg.base, t, phases, opts.seed, scheme, opts.on_episode);
      CentralizedPowerPolicy policy(trained.nets.actor);
      SchemeResult r = finish_learned(scheme, std::move(trained.history), env_cfg, phases, policy, steps, opts);
      r.central_actor = trained.nets.actor;
      return r;
    }
    case BaselineKind::kRandomPhase:
    case BaselineKind::kNoRis: {
      EnvConfig env = env_cfg;
      PhaseController phases = PhaseController::fixed(PhaseConfig::uniform(env.ris_elements, env.phase_bits));
      if (kind == BaselineKind::kNoRis)
        env.ris_enabled = false;
      else
        phases = PhaseController::random(env.ris_elements, env.phase_bits, opts.seed);
      PowerTrainingResult trained = train_power_agents(env, cfg, phases, opts.seed, scheme, opts.on_episode);
      std::vector<Mlp> actors;
      for (const auto& a : trained.learner.agents()) actors.push_back(a.actor);
      DecentralizedPowerPolicy policy(std::move(actors));
      // fresh draws for testing, independent of the training sequence
      if (kind == BaselineKind::kRandomPhase)
        phases = PhaseController::random(env.ris_elements, env.phase_bits, opts.test_seed);
      SchemeResult r = finish_learned(scheme, std::move(trained.history), env, phases, policy, steps, opts);
      r.learner.emplace(std::move(trained.learner));
      return r;
    }
    case BaselineKind::kMaxPower: {
      PhaseController phases = PhaseController::from_policy(*phase);
      MaxPowerPolicy policy;
      return finish_learned(scheme, {}, env_cfg, phases, policy, steps, opts);
    }
    case BaselineKind::kRandomPower: {
      PhaseController phases = PhaseController::from_policy(*phase);
      RandomPowerPolicy policy(opts.seed);
      return finish_learned(scheme, {}, env_cfg, phases, policy, steps, opts);
    }
  }
  throw std::invalid_argument("unknown baseline kind");
}

}  // namespace risvec
