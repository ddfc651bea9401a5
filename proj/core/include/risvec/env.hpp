#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "risvec/channel.hpp"
#include "risvec/geometry.hpp"
#include "risvec/rng.hpp"

namespace risvec {

struct EnvConfig {
  ScenarioLayout layout;
  FadingParams fading;
  int ris_elements = 36;
  int phase_bits = 3;
  double slot_s = 0.1;
  double arrival_rate_bps = 3e6;
  double packet_bits = 1000.0;
  double cycles_per_bit = 500.0;
  double capacitance = 1e-28;
  double cpu_max_hz = 2.15e9;
  double p_max_offload = 1.0;
  double p_max_local = 1.0;
  double w_ris = 1.0;
  double w_power = 1.0;
  double w_queue = 0.2;
  double queue_unit_bits = 1e5;  // bits per reward/state unit
  double snr_state_clip = 20.0;  // cap on log2(1+snr) in states
  bool ris_enabled = true;
  // Non-empty: vehicles sit still at these x positions (one per vehicle).
  std::vector<double> static_positions_x;

  int num_vehicles() const { return layout.num_vehicles; }
  int ris_state_dim() const { return ris_elements + 3 * num_vehicles(); }
  static constexpr int kVuStateDim = 5;
  static constexpr int kVuActionDim = 2;
  void validate() const;
};

struct PowerAction {
  double p_offload = 0.0;
  double p_local = 0.0;
};

struct StepOutcome {
  std::vector<double> queue_before;      // q(t)
  std::vector<double> offload_capacity;  // q_o(t), raw
  std::vector<double> local_capacity;    // q_l(t), raw
  std::vector<double> served_offload;    // capped by what is in the buffer
  std::vector<double> served_local;
  std::vector<double> arrivals;          // a(t)
  std::vector<double> snr;               // gamma_k(t) at the chosen power
  std::vector<double> r_local;
  double r_global = 0.0;
  double r_ris = 0.0;
  std::vector<double> queue_after;       // q(t+1)
  std::vector<ChannelSet> channels;      // slot realization
};

// Poisson packets of packet_bits with mean rate*dt bits.
double sample_arrivals(double rate_bps, double dt, double packet_bits, Rng& rng);

double local_cpu_hz(double p_local, const EnvConfig& cfg);
double local_capacity_bits(double p_local, const EnvConfig& cfg);

// [q - served_o - served_l]^+ + a
double update_queue(double q, double served_o, double served_l, double a);

// -(w1 (p_o + p_l) + w2 q); q in reward units
double local_reward(double p_o, double p_l, double q_units, double w1, double w2);
double global_reward(std::span<const double> r_locals);
// w * mean spectral efficiency
double ris_reward(std::span<const double> spectral_eff, double w);

double normalized_snr(double gamma, double clip);

// [theta (rad) | x_k/L, y_k/L | log2(1+gamma_k(t-1)) clipped]
Eigen::VectorXd build_ris_state(const PhaseConfig& phases, std::span<const VehicleState> vehicles,
                                std::span<const double> prev_snr, const EnvConfig& cfg);

// [q, q_o, q_l, q_o + q_l - q] / unit, then log2(1+gamma(t-1)) clipped
Eigen::VectorXd build_vu_state(double queue, double served_o, double served_l, double prev_snr,
                               const EnvConfig& cfg);

class VecEnv {
 public:
  VecEnv(EnvConfig cfg, std::uint64_t seed);

  void reset();
  StepOutcome step(const PhaseConfig& phases, std::span<const PowerAction> actions);

  Eigen::VectorXd ris_state() const;
  Eigen::VectorXd vu_state(int k) const;
  // Agents 0..K-1 concatenated, 5 entries each.
  Eigen::VectorXd joint_vu_state() const;

  const EnvConfig& config() const { return cfg_; }
  const std::vector<VehicleState>& vehicles() const { return vehicles_; }
  const std::vector<double>& queues() const { return queues_; }
  const PhaseConfig& phases() const { return phases_; }
  const Eigen::VectorXcd& ris_to_bs() const { return h_rb_; }

 private:
  EnvConfig cfg_;
  Rng arrivals_rng_;
  Rng fading_rng_;
  Rng mobility_rng_;
  Eigen::VectorXcd h_rb_;
  std::vector<VehicleState> vehicles_;
  std::vector<double> queues_;
  std::vector<double> prev_offload_;
  std::vector<double> prev_local_;
  std::vector<double> prev_ref_snr_;  // at p_max_offload, the channel-quality feature of both states
  PhaseConfig phases_;
};

}  // namespace risvec
