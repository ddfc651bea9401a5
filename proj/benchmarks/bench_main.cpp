// Microbenchmarks of the hot paths: network passes, one environment slot,
// replay sampling and a full MADDPG update round.
#include <benchmark/benchmark.h>

#include "risvec/maddpg.hpp"

namespace {

using namespace risvec;

void BM_MlpForward(benchmark::State& state) {
  Rng rng(1);
  const int width = static_cast<int>(state.range(0));
  const Mlp net(MlpSpec::make(40, {width, width}, 16, OutputActivation::kTanh), rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(40, 64);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_MlpForward)->Arg(64)->Arg(256)->Arg(512);

void BM_MlpBackward(benchmark::State& state) {
  Rng rng(2);
  const int width = static_cast<int>(state.range(0));
  const MlpSpec spec = MlpSpec::make(40, {width, width}, 1, OutputActivation::kIdentity);
  const Mlp net(spec, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(40, 64);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(1, 64);
  ParameterSet grads;
  for (auto _ : state) {
    ForwardCache cache;
    net.forward(x, &cache);
    benchmark::DoNotOptimize(net.backward(cache, g, grads));
  }
}
BENCHMARK(BM_MlpBackward)->Arg(64)->Arg(256)->Arg(512);

void BM_EnvStep(benchmark::State& state) {
  EnvConfig cfg;
  cfg.layout.num_vehicles = 4;
  cfg.ris_elements = static_cast<int>(state.range(0));
  VecEnv env(cfg, 3);
  const PhaseConfig phases = PhaseConfig::uniform(cfg.ris_elements, cfg.phase_bits);
  const std::vector<PowerAction> powers(4, PowerAction{0.5, 0.5});
  int t = 0;
  for (auto _ : state) {
    if (++t % 100 == 0) env.reset();
    benchmark::DoNotOptimize(env.step(phases, powers));
  }
}
BENCHMARK(BM_EnvStep)->Arg(16)->Arg(36);

void BM_ReplaySample(benchmark::State& state) {
  ReplayBuffer buf(100'000, 20, 8, 4);
  Rng rng(4);
  for (int i = 0; i < 100'000; ++i)
    buf.push({Eigen::VectorXd::Zero(20), Eigen::VectorXd::Zero(8), {0, 0, 0, 0}, 0.0, Eigen::VectorXd::Zero(20)});
  for (auto _ : state) benchmark::DoNotOptimize(buf.sample_batch(64, rng));
}
BENCHMARK(BM_ReplaySample);

void BM_MaddpgUpdateRound(benchmark::State& state) {
  MaddpgConfig cfg;
  cfg.base.actor_hidden = {32, 32};
  cfg.base.critic_hidden = {64, 32};
  Rng rng(5);
  MaddpgLearner learner(4, cfg, rng);
  ReplayBuffer buf(10'000, 20, 8, 4);
  for (int i = 0; i < 1000; ++i)
    buf.push({Eigen::VectorXd::Random(20), Eigen::VectorXd::Random(8).cwiseAbs(), {-1, -1, -1, -1}, -1.0,
              Eigen::VectorXd::Random(20)});
  for (auto _ : state) {
    const Batch b = buf.sample_batch(64, rng);
    learner.global_critic_update(b);
    for (int k = 0; k < 4; ++k) {
      learner.local_critic_update(k, b);
      learner.actor_update(k, b);
      learner.soft_update_agent(k);
    }
    learner.soft_update_globals();
  }
}
BENCHMARK(BM_MaddpgUpdateRound);

}  // namespace

BENCHMARK_MAIN();
