#include "risvec/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <vector>

#include "json.hpp"

namespace risvec {

namespace {

using nlohmann::json;

// Reads declared keys out of one JSON object and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.push_back(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        if (!it->is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        if constexpr (!std::is_same_v<T, int>)
          if (it->is_number_integer() && !it->is_number_unsigned() && it->template get<long long>() < 0)
            throw ConfigError(where(key) + ": expected a non-negative integer");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw ConfigError(where(key) + ": expected a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ConfigError(where(key) + ": expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw ConfigError(where(key) + ": expected a string");
      }
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  Section sub(const char* key) {
    seen_.push_back(key);
    const auto it = j_.find(key);
    static const json empty = json::object();
    return Section(it == j_.end() ? empty : *it, where(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) throw ConfigError("unknown key: " + where(key));
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

void get_position(Section& s, const char* key, Position3D& p) {
  std::vector<double> v{p.x, p.y, p.z};
  s.get(key, v);
  if (v.size() != 3) throw ConfigError(s.where(key) + ": expected [x, y, z]");
  p = {v[0], v[1], v[2]};
}

void read_ddpg(Section s, DdpgConfig& c, int* delay) {
  s.get("lr_actor", c.lr_actor);
  s.get("lr_critic", c.lr_critic);
  s.get("gamma", c.gamma);
  s.get("tau", c.tau);
  s.get("batch_size", c.batch_size);
  s.get("episodes", c.episodes);
  s.get("steps", c.steps);
  s.get("buffer_capacity", c.buffer_capacity);
  s.get("grad_clip", c.grad_clip);
  s.get("noise_initial", c.noise.initial);
  s.get("noise_decay", c.noise.decay);
  s.get("noise_floor", c.noise.floor);
  s.get("actor_hidden", c.actor_hidden);
  s.get("critic_hidden", c.critic_hidden);
  if (delay != nullptr) s.get("delay", *delay);
  s.finish();
}

json write_ddpg(const DdpgConfig& c) {
  return {{"lr_actor", c.lr_actor},
          {"lr_critic", c.lr_critic},
          {"gamma", c.gamma},
          {"tau", c.tau},
          {"batch_size", c.batch_size},
          {"episodes", c.episodes},
          {"steps", c.steps},
          {"buffer_capacity", c.buffer_capacity},
          {"grad_clip", c.grad_clip},
          {"noise_initial", c.noise.initial},
          {"noise_decay", c.noise.decay},
          {"noise_floor", c.noise.floor},
          {"actor_hidden", c.actor_hidden},
          {"critic_hidden", c.critic_hidden}};
}

bool same_ddpg(const DdpgConfig& a, const DdpgConfig& b) {
  return a.lr_actor == b.lr_actor && a.lr_critic == b.lr_critic && a.gamma == b.gamma && a.tau == b.tau &&
         a.batch_size == b.batch_size && a.episodes == b.episodes && a.steps == b.steps &&
         a.buffer_capacity == b.buffer_capacity && a.grad_clip == b.grad_clip && a.noise.initial == b.noise.initial &&
         a.noise.decay == b.noise.decay && a.noise.floor == b.noise.floor && a.actor_hidden == b.actor_hidden &&
         a.critic_hidden == b.critic_hidden;
}

bool same_position(const Position3D& a, const Position3D& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

}  // namespace

void ExperimentConfig::validate() const {
  try {
    env.validate();
    phase.validate();
    power.validate();
    td3.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (test_episodes < 1) throw ConfigError("test_episodes must be >= 1");
  if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

void ExperimentConfig::set_episodes(int episodes) {
  if (episodes < 1) throw ConfigError("episodes must be >= 1");
  phase.episodes = episodes;
  power.base.episodes = episodes;
}

ExperimentConfig ExperimentConfig::reference() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::desk() {
  ExperimentConfig c;
  c.out_dir = "runs/desk";
  c.env.layout.num_vehicles = 4;
  c.env.ris_elements = 16;
  for (DdpgConfig* d : {&c.phase, &c.power.base}) {
    d->episodes = 300;
    d->steps = 50;
    d->buffer_capacity = 100'000;
  }
  c.phase.actor_hidden = {64, 64};
  c.phase.critic_hidden = {128, 64};
  c.phase.gamma = 0.0;
  c.phase.batch_size = 256;
  c.phase.noise = {1.0, 0.99, 0.05};
  c.power.base.actor_hidden = {32, 32};
  c.power.base.critic_hidden = {64, 32};
  c.power.base.gamma = 0.9;
  c.power.base.episodes = 1000;
  c.power.base.noise = {1.0, 0.99, 0.05};
  return c;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  const auto& a = env;
  const auto& b = o.env;
  return seed == o.seed && out_dir == o.out_dir && baseline == o.baseline && test_episodes == o.test_episodes &&
         same_position(a.layout.bs, b.layout.bs) && same_position(a.layout.ris, b.layout.ris) &&
         a.layout.road_start_x == b.layout.road_start_x && a.layout.road_end_x == b.layout.road_end_x &&
         a.layout.road_y == b.layout.road_y && a.layout.vehicle_antenna_z == b.layout.vehicle_antenna_z &&
         a.layout.num_vehicles == b.layout.num_vehicles && a.layout.speed_min == b.layout.speed_min &&
         a.layout.speed_max == b.layout.speed_max && a.fading.rho == b.fading.rho &&
         a.fading.alpha_kb == b.fading.alpha_kb && a.fading.alpha_rb == b.fading.alpha_rb &&
         a.fading.alpha_kr == b.fading.alpha_kr && a.fading.rician_r == b.fading.rician_r &&
         a.fading.wavelength == b.fading.wavelength && a.fading.element_spacing == b.fading.element_spacing &&
         a.fading.noise_power == b.fading.noise_power && a.fading.bandwidth == b.fading.bandwidth &&
         a.ris_elements == b.ris_elements && a.phase_bits == b.phase_bits && a.slot_s == b.slot_s &&
         a.arrival_rate_bps == b.arrival_rate_bps && a.packet_bits == b.packet_bits &&
         a.cycles_per_bit == b.cycles_per_bit && a.capacitance == b.capacitance && a.cpu_max_hz == b.cpu_max_hz &&
         a.p_max_offload == b.p_max_offload && a.p_max_local == b.p_max_local && a.w_ris == b.w_ris &&
         a.w_power == b.w_power && a.w_queue == b.w_queue && a.queue_unit_bits == b.queue_unit_bits &&
         a.snr_state_clip == b.snr_state_clip && a.ris_enabled == b.ris_enabled &&
         a.static_positions_x == b.static_positions_x && same_ddpg(phase, o.phase) &&
         same_ddpg(power.base, o.power.base) && power.delay == o.power.delay &&
         td3.target_noise == o.td3.target_noise && td3.noise_clip == o.td3.noise_clip &&
         td3.policy_delay == o.td3.policy_delay;
}

ExperimentConfig parse_config(const std::string& json_text, const ExperimentConfig& base) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  ExperimentConfig c = base;
  Section top(root, "");

  Section ex = top.sub("experiment");
  ex.get("seed", c.seed);
  ex.get("out_dir", c.out_dir);
  std::string baseline(to_string(c.baseline));
  ex.get("baseline", baseline);
  try {
    c.baseline = parse_baseline_kind(baseline);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  ex.get("test_episodes", c.test_episodes);
  ex.finish();

  auto& L = c.env.layout;
  Section sc = top.sub("scenario");
  sc.get("num_vehicles", L.num_vehicles);
  get_position(sc, "bs", L.bs);
  get_position(sc, "ris", L.ris);
  sc.get("road_start_x", L.road_start_x);
  sc.get("road_end_x", L.road_end_x);
  sc.get("road_y", L.road_y);
  sc.get("vehicle_antenna_z", L.vehicle_antenna_z);
  sc.get("speed_min", L.speed_min);
  sc.get("speed_max", L.speed_max);
  sc.get("static_positions_x", c.env.static_positions_x);
  sc.finish();

  auto& F = c.env.fading;
  Section ch = top.sub("channel");
  ch.get("rho", F.rho);
  ch.get("alpha_kb", F.alpha_kb);
  ch.get("alpha_rb", F.alpha_rb);
  ch.get("alpha_kr", F.alpha_kr);
  ch.get("rician_r", F.rician_r);
  ch.get("wavelength", F.wavelength);
  ch.get("element_spacing", F.element_spacing);
  ch.get("noise_power", F.noise_power);
  ch.get("bandwidth", F.bandwidth);
  ch.finish();

  auto& E = c.env;
  Section sy = top.sub("system");
  sy.get("ris_elements", E.ris_elements);
  sy.get("phase_bits", E.phase_bits);
  sy.get("ris_enabled", E.ris_enabled);
  sy.get("slot_s", E.slot_s);
  sy.get("arrival_rate_bps", E.arrival_rate_bps);
  sy.get("packet_bits", E.packet_bits);
  sy.get("cycles_per_bit", E.cycles_per_bit);
  sy.get("capacitance", E.capacitance);
  sy.get("cpu_max_hz", E.cpu_max_hz);
  sy.get("p_max_offload", E.p_max_offload);
  sy.get("p_max_local", E.p_max_local);
  sy.finish();

  Section rw = top.sub("reward");
  rw.get("w_ris", E.w_ris);
  rw.get("w_power", E.w_power);
  rw.get("w_queue", E.w_queue);
  rw.get("queue_unit_bits", E.queue_unit_bits);
  rw.get("snr_state_clip", E.snr_state_clip);
  rw.finish();

  Section tr = top.sub("training");
  read_ddpg(tr.sub("phase"), c.phase, nullptr);
  read_ddpg(tr.sub("power"), c.power.base, &c.power.delay);
  Section td = tr.sub("td3");
  td.get("target_noise", c.td3.target_noise);
  td.get("noise_clip", c.td3.noise_clip);
  td.get("policy_delay", c.td3.policy_delay);
  td.finish();
  tr.finish();
  top.finish();

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw MissingFileError(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string dump_config(const ExperimentConfig& c) {
  const auto& L = c.env.layout;
  const auto& F = c.env.fading;
  const auto& E = c.env;
  auto pos = [](const Position3D& p) { return json::array({p.x, p.y, p.z}); };
  json power = write_ddpg(c.power.base);
  power["delay"] = c.power.delay;
  json root = {
      {"experiment",
       {{"seed", c.seed}, {"out_dir", c.out_dir}, {"baseline", to_string(c.baseline)},
        {"test_episodes", c.test_episodes}}},
      {"scenario",
       {{"num_vehicles", L.num_vehicles},
        {"bs", pos(L.bs)},
        {"ris", pos(L.ris)},
        {"road_start_x", L.road_start_x},
        {"road_end_x", L.road_end_x},
        {"road_y", L.road_y},
        {"vehicle_antenna_z", L.vehicle_antenna_z},
        {"speed_min", L.speed_min},
        {"speed_max", L.speed_max},
        {"static_positions_x", E.static_positions_x}}},
      {"channel",
       {{"rho", F.rho},
        {"alpha_kb", F.alpha_kb},
        {"alpha_rb", F.alpha_rb},
        {"alpha_kr", F.alpha_kr},
        {"rician_r", F.rician_r},
        {"wavelength", F.wavelength},
        {"element_spacing", F.element_spacing},
        {"noise_power", F.noise_power},
        {"bandwidth", F.bandwidth}}},
      {"system",
       {{"ris_elements", E.ris_elements},
        {"phase_bits", E.phase_bits},
        {"ris_enabled", E.ris_enabled},
        {"slot_s", E.slot_s},
        {"arrival_rate_bps", E.arrival_rate_bps},
        {"packet_bits", E.packet_bits},
        {"cycles_per_bit", E.cycles_per_bit},
        {"capacitance", E.capacitance},
        {"cpu_max_hz", E.cpu_max_hz},
        {"p_max_offload", E.p_max_offload},
        {"p_max_local", E.p_max_local}}},
      {"reward",
       {{"w_ris", E.w_ris},
        {"w_power", E.w_power},
        {"w_queue", E.w_queue},
        {"queue_unit_bits", E.queue_unit_bits},
        {"snr_state_clip", E.snr_state_clip}}},
      {"training",
       {{"phase", write_ddpg(c.phase)},
        {"power", power},
        {"td3",
         {{"target_noise", c.td3.target_noise},
          {"noise_clip", c.td3.noise_clip},
          {"policy_delay", c.td3.policy_delay}}}}}};
  return root.dump(2) + "\n";
}

}  // namespace risvec
