// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradcheck.hpp"
#include "phase_eval.hpp"
#include "risvec/baselines.hpp"
#include "risvec/config.hpp"
#include "risvec/experiment.hpp"
#include "risvec/maddpg.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace risvec;
using risvec::testing::read_file;
using risvec::testing::rel_err;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------- CLI glue

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + RISVEC_CLI_PATH + "\" " + args + " >>\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void require_cli(const std::string& args, const fs::path& log) {
  const int code = run_cli(args, log);
  if (code != 0) throw std::runtime_error("risvec " + args + " exited with " + std::to_string(code));
}

std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::istringstream in(read_file(p));
  std::string line;
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ls(l);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    return cells;
  };
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + p.string());
  header = split(line);
  while (std::getline(in, line)) {
    const auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

double num(const std::map<std::string, std::string>& row, const std::string& key) { return std::stod(row.at(key)); }

double mean_power_per_vu(const fs::path& episodes_csv) {
  const auto rows = read_csv(episodes_csv);
  double total = 0.0;
  int count = 0;
  for (const auto& r : rows)
    for (int k = 0;; ++k) {
      const auto it = r.find("p_offload_mean_" + std::to_string(k));
      if (it == r.end()) break;
      total += std::stod(it->second) + num(r, "p_local_mean_" + std::to_string(k));
      ++count;
    }
  if (count == 0) throw std::runtime_error("no power columns in " + episodes_csv.string());
  return total / count;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

// ---------------------------------------------------------------- criteria

// Channel composite recomputed with explicit real arithmetic.
double oracle_snr(double p, const ChannelSet& cs, const std::vector<int>& idx, int bits, double sigma2) {
  const double pi = std::acos(-1.0);
  double re = cs.h_kb.real();
  double im = cs.h_kb.imag();
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const double th = 2.0 * pi * idx[n] / static_cast<double>(1 << bits);
    const double ar = cs.h_rb[static_cast<Eigen::Index>(n)].real();
    const double ai = -cs.h_rb[static_cast<Eigen::Index>(n)].imag();  // conjugate
    const double br = cs.h_kr[static_cast<Eigen::Index>(n)].real();
    const double bi = cs.h_kr[static_cast<Eigen::Index>(n)].imag();
    const double cr = std::cos(th), ci = std::sin(th);
    const double tr = ar * cr - ai * ci, ti = ar * ci + ai * cr;
    re += tr * br - ti * bi;
    im += tr * bi + ti * br;
  }
  return p * (re * re + im * im) / sigma2;
}

Verdict ac1() {
  const auto t0 = Clock::now();
  EnvConfig env;
  env.layout.num_vehicles = 1;
  env.ris_elements = 2;
  env.phase_bits = 2;
  VecEnv e(env, 101);
  double worst = 0.0;
  int evaluated = 0;
  for (int t = 0; t < 20; ++t) {
    const StepOutcome out = e.step(PhaseConfig::uniform(2, 2), std::vector<PowerAction>{{1.0, 0.0}});
    PhaseConfig cfg = PhaseConfig::uniform(2, 2);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        cfg.indices = {a, b};
        const double got = snr(0.7, out.channels[0], cfg, env.fading.noise_power);
        const double want = oracle_snr(0.7, out.channels[0], {a, b}, 2, env.fading.noise_power);
        worst = std::max(worst, rel_err(got, want));
        ++evaluated;
      }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 1.0,
          "max rel err " + fmt(worst) + " over " + std::to_string(evaluated) + " evaluations, " + fmt(secs) + " s"};
}

EnvConfig ac2_env() {
  EnvConfig env = ExperimentConfig::desk().env;
  env.layout.num_vehicles = 2;
  env.ris_elements = 4;
  env.phase_bits = 2;
  env.static_positions_x = {248.0, 252.0};
  return env;
}

Verdict ac2() {
  const EnvConfig env = ac2_env();
  const DdpgConfig cfg = ExperimentConfig::desk().phase;
  bool all = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto t0 = Clock::now();
    const PhaseTrainingResult r = train_phase_agent(env, cfg, seed);
    const PhasePolicy policy(r.nets.actor, env.phase_bits);
    const auto ev = risvec::testing::evaluate_against_exhaustive(env, policy, split_seed(seed, 0, 0xAC2), 10, cfg.steps);
    const double secs = seconds_since(t0);
    const bool ok = ev.ratio() >= 0.9 && secs <= 600.0;
    all = all && ok;
    detail += "seed " + std::to_string(seed) + ": " + fmt(ev.ratio()) + " (random " +
              fmt(ev.random_rate / ev.exhaustive_rate) + ", " + fmt(secs, 3) + " s); ";
  }
  return {all, detail};
}

Verdict ac3() {
  Rng rng(303);
  std::vector<MlpSpec> specs;
  for (const ExperimentConfig& c : {ExperimentConfig::desk(), ExperimentConfig::reference()}) {
    const int n = c.env.ris_elements;
    const int k = c.env.num_vehicles();
    const auto& ph = c.phase;
    const auto& pw = c.power.base;
    specs.push_back(MlpSpec::make(n + 3 * k, ph.actor_hidden, n, OutputActivation::kTanh));
    specs.push_back(MlpSpec::make(n + 3 * k + n, ph.critic_hidden, 1, OutputActivation::kIdentity));
    specs.push_back(MlpSpec::make(5, pw.actor_hidden, 2, OutputActivation::kSigmoid));
    specs.push_back(MlpSpec::make(7, pw.critic_hidden, 1, OutputActivation::kIdentity));
    specs.push_back(MlpSpec::make(7 * k, pw.critic_hidden, 1, OutputActivation::kIdentity));
    specs.push_back(MlpSpec::make(5 * k, pw.actor_hidden, 2 * k, OutputActivation::kSigmoid));
  }
  const std::size_t shaped = specs.size();
  std::uniform_int_distribution<int> width(1, 16), depth(0, 3), act(0, 2);
  while (specs.size() < 100) {
    std::vector<int> hidden(static_cast<std::size_t>(depth(rng)));
    for (auto& h : hidden) h = width(rng);
    specs.push_back(MlpSpec::make(width(rng), hidden, width(rng), static_cast<OutputActivation>(act(rng))));
  }
  double worst = 0.0;
  long checked = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto r = risvec::testing::gradient_check(specs[i], rng, 3, i < shaped ? 400 : -1);
    worst = std::max(worst, r.max_rel_err);
    checked += r.checked;
  }
  return {worst <= 1e-4, std::to_string(specs.size()) + " networks (" + std::to_string(shaped) +
                             " in-use shapes), " + std::to_string(checked) + " coordinates, max rel err " + fmt(worst)};
}

Verdict ac4() {
  EnvConfig env;
  env.layout.num_vehicles = 4;
  env.ris_elements = 8;
  VecEnv e(env, 404);
  Rng rng(405);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> idx(0, (1 << env.phase_bits) - 1);
  double worst = 0.0;
  bool nonneg = true;
  for (int t = 0; t < 10000; ++t) {
    PhaseConfig p = PhaseConfig::uniform(env.ris_elements, env.phase_bits);
    for (auto& i : p.indices) i = idx(rng);
    std::vector<PowerAction> a;
    for (int k = 0; k < 4; ++k) a.push_back({u(rng) * u(rng), u(rng) * u(rng)});
    const StepOutcome out = e.step(p, a);
    for (std::size_t k = 0; k < 4; ++k) {
      const double literal =
          std::max(0.0, out.queue_before[k] - out.offload_capacity[k] - out.local_capacity[k]) + out.arrivals[k];
      worst = std::max(worst, rel_err(out.queue_after[k], literal));
      nonneg = nonneg && out.queue_after[k] >= 0.0;
    }
    if (t % 1000 == 999) e.reset();
  }
  return {worst <= 1e-9 && nonneg, "10^4 steps x 4 vehicles, max rel err " + fmt(worst) + (nonneg ? ", q >= 0" : ", NEGATIVE q")};
}

Verdict ac5() {
  Rng rng(505);
  const MlpSpec s = MlpSpec::make(6, {16, 8}, 3, OutputActivation::kTanh);
  const ParameterSet online = init_parameters(s, rng);
  ParameterSet target = init_parameters(s, rng);
  const ParameterSet start = target;
  const double tau = 0.005;
  const int n = 1000;
  for (int i = 0; i < n; ++i) soft_update(target, online, tau);
  const double decay = std::pow(1.0 - tau, n);
  double worst = 0.0;
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    for (Eigen::Index i = 0; i < target.weights[l].size(); ++i) {
      const double th = online.weights[l].data()[i];
      const double closed = th + decay * (start.weights[l].data()[i] - th);
      worst = std::max(worst, rel_err(target.weights[l].data()[i], closed));
    }
    for (Eigen::Index i = 0; i < target.biases[l].size(); ++i) {
      const double th = online.biases[l][i];
      const double closed = th + decay * (start.biases[l][i] - th);
      worst = std::max(worst, rel_err(target.biases[l][i], closed));
    }
  }
  return {worst <= 1e-6, "tau=0.005, n=1000, max rel err " + fmt(worst)};
}

Verdict ac6() {
  Rng rng(606);
  std::normal_distribution<double> n(0.0, 5.0);
  std::uniform_real_distribution<double> g(0.0, 1.0);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    Eigen::RowVectorXd r(1), q1(1), q2(1);
    r[0] = n(rng);
    q1[0] = n(rng);
    q2[0] = n(rng);
    const double gamma = g(rng);
    const double y = twin_min_target(r, gamma, q1, q2)[0];
    const double swapped = twin_min_target(r, gamma, q2, q1)[0];
    if (!(y == swapped && y <= r[0] + gamma * q1[0] && y <= r[0] + gamma * q2[0])) ++violations;
  }
  return {violations == 0, "1000 random cases, " + std::to_string(violations) + " violations"};
}

// Desk profile at the top of the 2-4 Mbit/s arrival range, where local
// execution alone nears its budget and the offload channel matters.
ExperimentConfig desk_at_load() {
  ExperimentConfig c = ExperimentConfig::desk();
  c.env.arrival_rate_bps = 4e6;
  return c;
}

// Shared desk-profile runs: AC7 trains the N=16 phase agents into the same
// directories AC8 continues from.
struct DeskRuns {
  fs::path root;
  fs::path config;
  fs::path log;
  std::map<std::uint64_t, double> phase_seconds;

  fs::path dir(std::uint64_t seed) const { return root / ("seed_" + std::to_string(seed)); }
  std::string common(std::uint64_t seed) const {
    return " --quiet --config \"" + config.string() + "\" --seed " + std::to_string(seed) + " --out \"" +
           dir(seed).string() + "\"";
  }
  void ensure_phase(std::uint64_t seed) {
    if (phase_seconds.count(seed) != 0) return;
    const auto t0 = Clock::now();
    require_cli("train-phase" + common(seed), log);
    phase_seconds[seed] = seconds_since(t0);
  }
};

double final_phase_reward(const fs::path& csv) { return num(read_csv(csv).back(), "mean_ris_reward"); }

Verdict ac7(DeskRuns& desk, const fs::path& work) {
  ExperimentConfig small = desk_at_load();
  small.env.ris_elements = 8;
  const fs::path cfg8 = work / "ac7_n8.json";
  std::ofstream(cfg8) << dump_config(small);
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    desk.ensure_phase(seed);
    const fs::path d8 = work / "ac7_n8" / ("seed_" + std::to_string(seed));
    require_cli("train-phase --quiet --config \"" + cfg8.string() + "\" --seed " + std::to_string(seed) + " --out \"" +
                    d8.string() + "\"",
                desk.log);
    const double r16 = final_phase_reward(desk.dir(seed) / files::kPhaseEpisodes);
    const double r8 = final_phase_reward(d8 / files::kPhaseEpisodes);
    if (r16 >= r8) ++wins;
    detail += "s" + std::to_string(seed) + " N16 " + fmt(r16) + " vs N8 " + fmt(r8) + "; ";
  }
  return {wins >= 4, std::to_string(wins) + "/5 seeds N=16 >= N=8: " + detail};
}

struct SchemePowers {
  double proposed = 0, random_phase = 0, no_ris = 0, centralized = 0, max_power = 0;
  double proposed_final_queue = 0;
};

std::map<std::uint64_t, SchemePowers> g_powers;

Verdict ac8(DeskRuns& desk) {
  const auto t0 = Clock::now();
  double phase_time = 0.0;
  int ordered = 0, beats_central = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    desk.ensure_phase(seed);
    phase_time += desk.phase_seconds[seed];
    const std::string c = desk.common(seed);
    require_cli("train-power" + c, desk.log);
    require_cli("test" + c, desk.log);
    for (const char* b : {"random-phase", "no-ris", "centralized-ddpg", "max-power"})
      require_cli(std::string("baseline --baseline ") + b + c, desk.log);
    const fs::path d = desk.dir(seed);
    SchemePowers p;
    p.proposed = mean_power_per_vu(d / files::kTestEpisodes);
    p.random_phase = mean_power_per_vu(d / "random-phase_test_episodes.csv");
    p.no_ris = mean_power_per_vu(d / "no-ris_test_episodes.csv");
    p.centralized = mean_power_per_vu(d / "centralized-ddpg_test_episodes.csv");
    p.max_power = mean_power_per_vu(d / "max-power_test_episodes.csv");
    p.proposed_final_queue = num(read_csv(d / files::kPowerEpisodes).back(), "queue_bits_mean");
    g_powers[seed] = p;
    if (p.proposed <= p.random_phase && p.random_phase <= p.no_ris) ++ordered;
    if (p.proposed < p.centralized) ++beats_central;
    detail += "s" + std::to_string(seed) + " " + fmt(p.proposed, 3) + "/" + fmt(p.random_phase, 3) + "/" +
              fmt(p.no_ris, 3) + "/" + fmt(p.centralized, 3) + "; ";
  }
  const double minutes = (seconds_since(t0) + phase_time) / 60.0;
  return {ordered >= 4 && beats_central >= 3 && minutes <= 30.0,
          "W per VU proposed/random-phase/no-ris/centralized-ddpg: " + detail + "ordered " + std::to_string(ordered) +
              "/5, below centralized " + std::to_string(beats_central) + "/5, " + fmt(minutes, 3) + " min"};
}

Verdict ac9(DeskRuns& desk) {
  if (g_powers.empty()) ac8(desk);
  const EnvConfig env = desk_at_load().env;
  const double per_slot = env.arrival_rate_bps * env.slot_s;
  bool all = true;
  std::string detail;
  for (const auto& [seed, p] : g_powers) {
    const bool ok = p.proposed_final_queue <= 2.0 * per_slot && p.max_power >= 1.8 * p.proposed;
    all = all && ok;
    detail += "s" + std::to_string(seed) + " queue " + fmt(p.proposed_final_queue / per_slot, 3) + "x arrival, max-power " +
              fmt(p.max_power / p.proposed, 3) + "x power; ";
  }
  return {all, detail};
}

ExperimentConfig quick_config() {
  ExperimentConfig c = ExperimentConfig::desk();
  c.set_episodes(4);
  c.phase.steps = 20;
  c.power.base.steps = 20;
  c.phase.batch_size = 16;
  c.power.base.batch_size = 16;
  c.test_episodes = 2;
  return c;
}

Verdict ac10(const fs::path& work) {
  const fs::path cfg = work / "ac10.json";
  std::ofstream(cfg) << dump_config(quick_config());
  const fs::path log = work / "ac10.log";
  for (const char* name : {"first", "second"}) {
    const std::string c = " --quiet --seed 7 --config \"" + cfg.string() + "\" --out \"" + (work / "ac10" / name).string() + "\"";
    require_cli("train-phase" + c, log);
    require_cli("train-power" + c, log);
    require_cli("test" + c, log);
    require_cli("baseline --baseline centralized-td3" + c, log);
  }
  int compared = 0, identical = 0;
  for (const auto& entry : fs::directory_iterator(work / "ac10" / "first")) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    if (read_file(entry.path()) == read_file(work / "ac10" / "second" / entry.path().filename())) ++identical;
  }
  return {compared >= 6 && identical == compared,
          std::to_string(identical) + "/" + std::to_string(compared) + " metric CSVs byte-identical"};
}

Verdict ac11(const fs::path& work) {
  const fs::path cfg = work / "ac11.json";
  std::ofstream(cfg) << dump_config(quick_config());
  const fs::path log = work / "ac11.log";
  const fs::path dir = work / "ac11";
  const std::string c = " --quiet --seed 11 --config \"" + cfg.string() + "\" --out \"" + dir.string() + "\"";
  require_cli("train-phase" + c, log);
  require_cli("train-power" + c, log);
  std::vector<fs::path> ckpts;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".ckpt") ckpts.push_back(entry.path());
  std::sort(ckpts.begin(), ckpts.end());
  std::vector<std::uint64_t> before;
  for (const auto& p : ckpts) before.push_back(fnv1a(read_file(p)));
  require_cli("test" + c, log);
  int same = 0;
  for (std::size_t i = 0; i < ckpts.size(); ++i)
    if (fnv1a(read_file(ckpts[i])) == before[i]) ++same;
  return {ckpts.size() >= 6 && same == static_cast<int>(ckpts.size()) && fs::exists(dir / files::kTestSteps),
          std::to_string(same) + "/" + std::to_string(ckpts.size()) + " checkpoint hashes unchanged"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string work_dir = "acceptance_work";
  std::vector<std::string> only;
  app.add_option("--work-dir", work_dir, "Scratch directory for runs");
  app.add_option("--only", only, "Subset of criteria, e.g. AC2 AC8");
  CLI11_PARSE(app, argc, argv);

  const fs::path work = fs::absolute(work_dir);
  fs::remove_all(work);
  fs::create_directories(work);

  DeskRuns desk;
  desk.root = work / "desk";
  desk.config = work / "desk.json";
  desk.log = work / "desk.log";
  std::ofstream(desk.config) << dump_config(desk_at_load());

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"AC1", ac1},
      {"AC2", ac2},
      {"AC3", ac3},
      {"AC4", ac4},
      {"AC5", ac5},
      {"AC6", ac6},
      {"AC7", [&] { return ac7(desk, work); }},
      {"AC8", [&] { return ac8(desk); }},
      {"AC9", [&] { return ac9(desk); }},
      {"AC10", [&] { return ac10(work); }},
      {"AC11", [&] { return ac11(work); }},
  };

  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << name << ' ' << (v.pass ? "PASS" : "FAIL") << " [" << fmt(seconds_since(t0), 3) << " s] " << v.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
