#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "risvec/ddpg.hpp"
#include "risvec/rollout.hpp"

namespace risvec {

inline constexpr int kCsvSchemaVersion = 1;

// Shortest text that parses back to the same double.
std::string format_double(double v);

using CsvRow = std::vector<std::string>;

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;

  // Throws std::invalid_argument when the row width differs from the header.
  void add(CsvRow row);
  std::string str() const;
  void save(const std::filesystem::path& path) const;
};

// episode, mean_ris_reward, mean_rate_bps, noise_std
CsvTable phase_episode_table(const std::vector<PhaseEpisodeMetrics>& history);

// episode, scheme, r_global_mean, r_local_mean_k..., p_offload_mean_k...,
// p_local_mean_k..., queue_bits_mean
CsvTable power_episode_table(int num_vehicles, const std::vector<PowerEpisodeMetrics>& history);

// episode, step, scheme, power_o_k..., power_l_k..., queue_bits_k...,
// snr_db_k..., r_local_k..., r_global
CsvTable step_table(int num_vehicles, const std::vector<StepRow>& rows);

struct SweepPoint {
  double value = 0.0;
  std::string scheme;
  double train_final_r_global = 0.0;
  double test_r_global_mean = 0.0;
  double test_power_per_vu = 0.0;
  double test_queue_bits_mean = 0.0;
};

// variable, value, scheme, train_final_r_global, test_r_global_mean,
// test_power_per_vu, test_queue_bits_mean
CsvTable sweep_table(const std::string& variable, const std::vector<SweepPoint>& points);

}  // namespace risvec
