#include "risvec/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace risvec {

void EnvConfig::validate() const {
  layout.validate();
  fading.validate();
  if (ris_elements < 1) throw std::invalid_argument("ris_elements must be >= 1");
  if (phase_bits < 1 || phase_bits > 16) throw std::invalid_argument("phase_bits out of range");
  if (!(slot_s > 0.0)) throw std::invalid_argument("slot_s must be positive");
  if (arrival_rate_bps < 0.0) throw std::invalid_argument("arrival_rate_bps must be non-negative");
  if (!(packet_bits > 0.0)) throw std::invalid_argument("packet_bits must be positive");
  if (!(cycles_per_bit > 0.0) || !(capacitance > 0.0) || !(cpu_max_hz > 0.0))
    throw std::invalid_argument("local compute parameters must be positive");
  if (!(p_max_offload > 0.0) || !(p_max_local > 0.0))
    throw std::invalid_argument("power budgets must be positive");
  if (w_power < 0.0 || w_queue < 0.0 || !(w_ris > 0.0))
    throw std::invalid_argument("reward weights must be non-negative (w_ris positive)");
  if (!(queue_unit_bits > 0.0) || !(snr_state_clip > 0.0))
    throw std::invalid_argument("normalization constants must be positive");
  if (!static_positions_x.empty() &&
      static_positions_x.size() != static_cast<std::size_t>(num_vehicles()))
    throw std::invalid_argument("static_positions_x must list one x per vehicle");
}

double sample_arrivals(double rate_bps, double dt, double packet_bits, Rng& rng) {
  const double mean_packets = rate_bps * dt / packet_bits;
  if (mean_packets <= 0.0) return 0.0;
  std::poisson_distribution<long long> packets(mean_packets);
  return static_cast<double>(packets(rng)) * packet_bits;
}

double local_cpu_hz(double p_local, const EnvConfig& cfg) {
  if (p_local < 0.0) throw std::invalid_argument("local power must be non-negative");
  return std::min(cfg.cpu_max_hz, std::cbrt(p_local / cfg.capacitance));
}

double local_capacity_bits(double p_local, const EnvConfig& cfg) {
  return cfg.slot_s * local_cpu_hz(p_local, cfg) / cfg.cycles_per_bit;
}

double update_queue(double q, double served_o, double served_l, double a) {
  return std::max(0.0, q - served_o - served_l) + a;
}

double local_reward(double p_o, double p_l, double q_units, double w1, double w2) {
  return -(w1 * (p_o + p_l) + w2 * q_units);
}

double global_reward(std::span<const double> r_locals) {
  if (r_locals.empty()) throw std::invalid_argument("global_reward: empty list");
  return std::accumulate(r_locals.begin(), r_locals.end(), 0.0) /
         static_cast<double>(r_locals.size());
}

double ris_reward(std::span<const double> spectral_eff, double w) {
  if (spectral_eff.empty()) throw std::invalid_argument("ris_reward: empty list");
  return w * std::accumulate(spectral_eff.begin(), spectral_eff.end(), 0.0) /
         static_cast<double>(spectral_eff.size());
}

double normalized_snr(double gamma, double clip) {
  return std::clamp(std::log2(1.0 + std::max(gamma, 0.0)), 0.0, clip);
}

Eigen::VectorXd build_ris_state(const PhaseConfig& phases, std::span<const VehicleState> vehicles,
                                std::span<const double> prev_snr, const EnvConfig& cfg) {
  const int n = phases.size();
  const int k = static_cast<int>(vehicles.size());
  if (n != cfg.ris_elements || k != cfg.num_vehicles() || prev_snr.size() != vehicles.size())
    throw std::invalid_argument("build_ris_state: dimension mismatch");
  Eigen::VectorXd s(n + 3 * k);
  for (int i = 0; i < n; ++i) s[i] = phases.phase(i);
  const double length = cfg.layout.road_length();
  for (int i = 0; i < k; ++i) {
    s[n + 2 * i] = vehicles[static_cast<std::size_t>(i)].position.x / length;
    s[n + 2 * i + 1] = vehicles[static_cast<std::size_t>(i)].position.y / length;
  }
  for (int i = 0; i < k; ++i)
    s[n + 2 * k + i] = normalized_snr(prev_snr[static_cast<std::size_t>(i)], cfg.snr_state_clip);
  return s;
}

Eigen::VectorXd build_vu_state(double queue, double served_o, double served_l, double prev_snr,
                               const EnvConfig& cfg) {
  Eigen::VectorXd s(EnvConfig::kVuStateDim);
  const double unit = cfg.queue_unit_bits;
  s[0] = queue / unit;
  s[1] = served_o / unit;
  s[2] = served_l / unit;
  s[3] = s[1] + s[2] - s[0];
  s[4] = normalized_snr(prev_snr, cfg.snr_state_clip);
  return s;
}

VecEnv::VecEnv(EnvConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      arrivals_rng_(make_rng(seed, Stream::kArrivals)),
      fading_rng_(make_rng(seed, Stream::kFading)),
      mobility_rng_(make_rng(seed, Stream::kMobility)) {
  cfg_.validate();
  h_rb_ = ris_to_bs_channel(cfg_.fading, cfg_.layout, cfg_.ris_elements);
  reset();
}

void VecEnv::reset() {
  const auto k = static_cast<std::size_t>(cfg_.num_vehicles());
  vehicles_ = spawn_vehicles(cfg_.layout, mobility_rng_);
  if (!cfg_.static_positions_x.empty())
    for (std::size_t i = 0; i < k; ++i) vehicles_[i].position.x = cfg_.static_positions_x[i];
  queues_.assign(k, 0.0);
  prev_offload_.assign(k, 0.0);
  prev_local_.assign(k, 0.0);
  prev_ref_snr_.assign(k, 0.0);
  phases_ = PhaseConfig::uniform(cfg_.ris_elements, cfg_.phase_bits);
}

StepOutcome VecEnv::step(const PhaseConfig& phases, std::span<const PowerAction> actions) {
  const auto k_count = static_cast<std::size_t>(cfg_.num_vehicles());
  if (actions.size() != k_count) throw std::invalid_argument("step: one action per vehicle required");
  if (phases.size() != cfg_.ris_elements || phases.bits != cfg_.phase_bits)
    throw std::invalid_argument("step: phase configuration does not match the RIS");
  phases.validate();
  for (const auto& a : actions) {
    if (!(a.p_offload >= 0.0 && a.p_offload <= cfg_.p_max_offload) ||
        !(a.p_local >= 0.0 && a.p_local <= cfg_.p_max_local))
      throw std::invalid_argument("step: power outside [0, P_max]");
  }

  StepOutcome out;
  out.queue_before = queues_;
  out.channels.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k)
    out.channels.push_back(vehicle_channels(cfg_.fading, cfg_.layout, vehicles_[k].position, h_rb_,
                                            draw_small_scale(fading_rng_)));

  const auto& f = cfg_.fading;
  std::vector<double> ref_snr(k_count);
  std::vector<double> spectral(k_count);
  out.snr.resize(k_count);
  out.offload_capacity.resize(k_count);
  out.local_capacity.resize(k_count);
  out.served_offload.resize(k_count);
  out.served_local.resize(k_count);
  out.arrivals.resize(k_count);
  out.queue_after.resize(k_count);
  out.r_local.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& cs = out.channels[k];
    const double p_o = actions[k].p_offload;
    const double p_l = actions[k].p_local;
    if (cfg_.ris_enabled) {
      out.snr[k] = snr(p_o, cs, phases, f.noise_power);
      ref_snr[k] = snr(cfg_.p_max_offload, cs, phases, f.noise_power);
    } else {
      out.snr[k] = snr_direct(p_o, cs.h_kb, f.noise_power);
      ref_snr[k] = snr_direct(cfg_.p_max_offload, cs.h_kb, f.noise_power);
    }
    spectral[k] = std::log2(1.0 + out.snr[k]);
    out.offload_capacity[k] = rate_bits(out.snr[k], f.bandwidth, cfg_.slot_s);
    out.local_capacity[k] = local_capacity_bits(p_l, cfg_);
    out.served_offload[k] = std::min(out.offload_capacity[k], queues_[k]);
    out.served_local[k] = std::min(out.local_capacity[k], queues_[k] - out.served_offload[k]);
    out.arrivals[k] = sample_arrivals(cfg_.arrival_rate_bps, cfg_.slot_s, cfg_.packet_bits,
                                      arrivals_rng_);
    out.queue_after[k] =
        update_queue(queues_[k], out.offload_capacity[k], out.local_capacity[k], out.arrivals[k]);
    out.r_local[k] = local_reward(p_o, p_l, out.queue_after[k] / cfg_.queue_unit_bits,
                                  cfg_.w_power, cfg_.w_queue);
  }
  out.r_global = global_reward(out.r_local);
  out.r_ris = ris_reward(spectral, cfg_.w_ris);

  queues_ = out.queue_after;
  prev_offload_ = out.offload_capacity;
  prev_local_ = out.local_capacity;
  prev_ref_snr_ = ref_snr;
  phases_ = phases;
  if (cfg_.static_positions_x.empty())
    vehicles_ = advance_vehicles(std::move(vehicles_), cfg_.slot_s, cfg_.layout, mobility_rng_);
  return out;
}

Eigen::VectorXd VecEnv::ris_state() const {
  return build_ris_state(phases_, vehicles_, prev_ref_snr_, cfg_);
}

Eigen::VectorXd VecEnv::vu_state(int k) const {
  const auto i = static_cast<std::size_t>(k);
  if (k < 0 || i >= queues_.size()) throw std::out_of_range("vu_state: agent index");
  return build_vu_state(queues_[i], prev_offload_[i], prev_local_[i], prev_ref_snr_[i], cfg_);
}

Eigen::VectorXd VecEnv::joint_vu_state() const {
  const int k_count = cfg_.num_vehicles();
  Eigen::VectorXd s(k_count * EnvConfig::kVuStateDim);
  for (int k = 0; k < k_count; ++k)
    s.segment(k * EnvConfig::kVuStateDim, EnvConfig::kVuStateDim) = vu_state(k);
  return s;
}

}  // namespace risvec
