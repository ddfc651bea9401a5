#include "risvec/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace risvec {

PhaseController PhaseController::from_policy(PhasePolicy policy) {
  PhaseController c;
  c.mode_ = Mode::kPolicy;
  c.policy_.emplace(std::move(policy));
  return c;
}

PhaseController PhaseController::random(int elements, int bits, std::uint64_t seed) {
  PhaseController c;
  c.mode_ = Mode::kRandom;
  c.fixed_ = PhaseConfig::uniform(elements, bits);
  c.rng_ = make_rng(seed, Stream::kPhase);
  return c;
}

PhaseController PhaseController::fixed(PhaseConfig cfg) {
  cfg.validate();
  PhaseController c;
  c.mode_ = Mode::kFixed;
  c.fixed_ = std::move(cfg);
  return c;
}

PhaseConfig PhaseController::next(const VecEnv& env) {
  switch (mode_) {
    case Mode::kPolicy: return policy_->act(env.ris_state());
    case Mode::kRandom: {
      PhaseConfig cfg = fixed_;
      std::uniform_int_distribution<int> level(0, cfg.levels() - 1);
      for (auto& idx : cfg.indices) idx = level(rng_);
      return cfg;
    }
    case Mode::kFixed: return fixed_;
  }
  return fixed_;
}

PowerAction powers_from_unit(double u_offload, double u_local, const EnvConfig& cfg) {
  return {std::clamp(u_offload * cfg.p_max_offload, kMinPower, cfg.p_max_offload),
          std::clamp(u_local * cfg.p_max_local, kMinPower, cfg.p_max_local)};
}

DecentralizedPowerPolicy::DecentralizedPowerPolicy(std::vector<Mlp> actors) : actors_(std::move(actors)) {}

std::vector<PowerAction> DecentralizedPowerPolicy::act(const VecEnv& env) {
  const int k_count = env.config().num_vehicles();
  if (static_cast<int>(actors_.size()) != k_count)
    throw std::invalid_argument("decentralized policy: one actor per vehicle required");
  std::vector<PowerAction> out;
  for (int k = 0; k < k_count; ++k) {
    const Eigen::VectorXd u = actors_[static_cast<std::size_t>(k)](env.vu_state(k));
    out.push_back(powers_from_unit(u[0], u[1], env.config()));
  }
  return out;
}

CentralizedPowerPolicy::CentralizedPowerPolicy(Mlp actor) : actor_(std::move(actor)) {}

std::vector<PowerAction> CentralizedPowerPolicy::act(const VecEnv& env) {
  const Eigen::VectorXd u = actor_(env.joint_vu_state());
  const int k_count = env.config().num_vehicles();
  if (u.size() != 2 * k_count) throw std::invalid_argument("centralized policy: output size mismatch");
  std::vector<PowerAction> out;
  for (int k = 0; k < k_count; ++k) out.push_back(powers_from_unit(u[2 * k], u[2 * k + 1], env.config()));
  return out;
}

std::vector<PowerAction> MaxPowerPolicy::act(const VecEnv& env) {
  const auto& cfg = env.config();
  return std::vector<PowerAction>(static_cast<std::size_t>(cfg.num_vehicles()),
                                  PowerAction{cfg.p_max_offload, cfg.p_max_local});
}

RandomPowerPolicy::RandomPowerPolicy(std::uint64_t seed) : rng_(make_rng(seed, Stream::kPowerHeuristic)) {}

std::vector<PowerAction> RandomPowerPolicy::act(const VecEnv& env) {
  const auto& cfg = env.config();
  // (0, 1] via 1 - U[0, 1)
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PowerAction> out;
  for (int k = 0; k < cfg.num_vehicles(); ++k) {
    const double uo = 1.0 - u(rng_);
    const double ul = 1.0 - u(rng_);
    out.push_back({uo * cfg.p_max_offload, ul * cfg.p_max_local});
  }
  return out;
}

double PowerEpisodeMetrics::power_per_vu() const {
  if (p_offload_mean.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < p_offload_mean.size(); ++k) s += p_offload_mean[k] + p_local_mean[k];
  return s / static_cast<double>(p_offload_mean.size());
}

EpisodeAccumulator::EpisodeAccumulator(int num_vehicles, int episode, std::string scheme) {
  const auto k = static_cast<std::size_t>(num_vehicles);
  m_.episode = episode;
  m_.scheme = std::move(scheme);
  m_.r_local_mean.assign(k, 0.0);
  m_.p_offload_mean.assign(k, 0.0);
  m_.p_local_mean.assign(k, 0.0);
}

void EpisodeAccumulator::add(std::span<const PowerAction> actions, const StepOutcome& out) {
  for (std::size_t k = 0; k < m_.r_local_mean.size(); ++k) {
    m_.r_local_mean[k] += out.r_local[k];
    m_.p_offload_mean[k] += actions[k].p_offload;
    m_.p_local_mean[k] += actions[k].p_local;
    queue_sum_ += out.queue_before[k];
  }
  m_.r_global_mean += out.r_global;
  ++steps_;
}

PowerEpisodeMetrics EpisodeAccumulator::finish() const {
  PowerEpisodeMetrics m = m_;
  if (steps_ == 0) return m;
  const double n = steps_;
  m.r_global_mean /= n;
  for (auto& v : m.r_local_mean) v /= n;
  for (auto& v : m.p_offload_mean) v /= n;
  for (auto& v : m.p_local_mean) v /= n;
  m.queue_bits_mean = queue_sum_ / (n * static_cast<double>(m.r_local_mean.size()));
  return m;
}

StepRow make_step_row(int episode, int step, const std::string& scheme,
                      std::span<const PowerAction> actions, const StepOutcome& out) {
  StepRow row;
  row.episode = episode;
  row.step = step;
  row.scheme = scheme;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    row.p_offload.push_back(actions[k].p_offload);
    row.p_local.push_back(actions[k].p_local);
    row.queue_bits.push_back(out.queue_before[k]);
    // zero SNR is reported as the floor of the dB scale
    row.snr_db.push_back(out.snr[k] > 0.0 ? 10.0 * std::log10(out.snr[k]) : -300.0);
    row.r_local.push_back(out.r_local[k]);
  }
  row.r_global = out.r_global;
  return row;
}

RolloutResult run_rollout(const EnvConfig& env_cfg, std::uint64_t env_seed, PhaseController& phases,
                          PowerPolicy& powers, int episodes, int steps, const std::string& scheme,
                          bool record_steps) {
  VecEnv env(env_cfg, env_seed);
  RolloutResult result;
  for (int e = 0; e < episodes; ++e) {
    env.reset();
    EpisodeAccumulator acc(env_cfg.num_vehicles(), e, scheme);
    for (int t = 0; t < steps; ++t) {
      const PhaseConfig cfg = phases.next(env);
      const std::vector<PowerAction> actions = powers.act(env);
      const StepOutcome out = env.step(cfg, actions);
      acc.add(actions, out);
      if (record_steps) result.steps.push_back(make_step_row(e, t, scheme, actions, out));
    }
    result.episodes.push_back(acc.finish());
  }
  return result;
}

}  // namespace risvec
