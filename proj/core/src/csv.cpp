#include "risvec/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace risvec {

namespace {

void append_indexed(CsvRow& header, const std::string& name, int count) {
  for (int k = 0; k < count; ++k) header.push_back(name + "_" + std::to_string(k));
}

void append_values(CsvRow& row, const std::vector<double>& values) {
  for (double v : values) row.push_back(format_double(v));
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in metrics");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void CsvTable::add(CsvRow row) {
  if (row.size() != header.size())
    throw std::invalid_argument("csv row has " + std::to_string(row.size()) + " columns, header has " +
                                std::to_string(header.size()));
  rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto write = [&os](const CsvRow& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  };
  write(header);
  for (const auto& r : rows) write(r);
  return os.str();
}

void CsvTable::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << str();
}

CsvTable phase_episode_table(const std::vector<PhaseEpisodeMetrics>& history) {
  CsvTable t;
  t.header = {"episode", "mean_ris_reward", "mean_rate_bps", "noise_std"};
  for (const auto& m : history)
    t.add({std::to_string(m.episode), format_double(m.mean_ris_reward), format_double(m.mean_rate_bps),
           format_double(m.noise_std)});
  return t;
}

CsvTable power_episode_table(int num_vehicles, const std::vector<PowerEpisodeMetrics>& history) {
  CsvTable t;
  t.header = {"episode", "scheme", "r_global_mean"};
  append_indexed(t.header, "r_local_mean", num_vehicles);
  append_indexed(t.header, "p_offload_mean", num_vehicles);
  append_indexed(t.header, "p_local_mean", num_vehicles);
  t.header.push_back("queue_bits_mean");
  for (const auto& m : history) {
    CsvRow row{std::to_string(m.episode), m.scheme, format_double(m.r_global_mean)};
    append_values(row, m.r_local_mean);
    append_values(row, m.p_offload_mean);
    append_values(row, m.p_local_mean);
    row.push_back(format_double(m.queue_bits_mean));
    t.add(std::move(row));
  }
  return t;
}

CsvTable step_table(int num_vehicles, const std::vector<StepRow>& rows) {
  CsvTable t;
  t.header = {"episode", "step", "scheme"};
  append_indexed(t.header, "power_o", num_vehicles);
  append_indexed(t.header, "power_l", num_vehicles);
  append_indexed(t.header, "queue_bits", num_vehicles);
  append_indexed(t.header, "snr_db", num_vehicles);
  append_indexed(t.header, "r_local", num_vehicles);
  t.header.push_back("r_global");
  for (const auto& s : rows) {
    CsvRow row{std::to_string(s.episode), std::to_string(s.step), s.scheme};
    append_values(row, s.p_offload);
    append_values(row, s.p_local);
    append_values(row, s.queue_bits);
    append_values(row, s.snr_db);
    append_values(row, s.r_local);
    row.push_back(format_double(s.r_global));
    t.add(std::move(row));
  }
  return t;
}

CsvTable sweep_table(const std::string& variable, const std::vector<SweepPoint>& points) {
  CsvTable t;
  t.header = {"variable",           "value",           "scheme",           "train_final_r_global",
              "test_r_global_mean", "test_power_per_vu", "test_queue_bits_mean"};
  for (const auto& p : points)
    t.add({variable, format_double(p.value), p.scheme, format_double(p.train_final_r_global),
           format_double(p.test_r_global_mean), format_double(p.test_power_per_vu),
           format_double(p.test_queue_bits_mean)});
  return t;
}

}  // namespace risvec
