#include <benchmark/benchmark.h>

#include "c4q/harness.hpp"
#include "c4q/negamax.hpp"
#include "c4q/qlearn.hpp"
#include "c4q/qnetwork.hpp"
#include "c4q/qsim.hpp"

using namespace c4q;

namespace {

Board midgame() {
  Board b;
  int player = 1;
  for (int c : {3, 3, 2, 4, 4, 2, 5, 1}) {
    b = apply_action(b, Action{c}, player);
    player = -player;
  }
  return b;
}

void BM_Negamax(benchmark::State& state) {
  Board b = midgame();
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(negamax(b, depth, 1));
}
BENCHMARK(BM_Negamax)->Arg(2)->Arg(4);

void BM_Predict(benchmark::State& state) {
  QNetwork net(1);
  Board b = midgame();
  for (auto _ : state) benchmark::DoNotOptimize(net.predict(b));
}
BENCHMARK(BM_Predict);

void BM_QValues(benchmark::State& state) {
  QNetwork net(1);
  Board b = midgame();
  for (auto _ : state) benchmark::DoNotOptimize(q_values(net, b, 1));
}
BENCHMARK(BM_QValues);

void BM_QuantumSelect(benchmark::State& state) {
  ActionValues q;
  for (int c = 0; c < kCols; ++c) q[Action{c}] = 0.1 * c - 0.3;
  auto dist = boltzmann_distribution(q, 1.0);
  FlagSet flags = FlagSet::of({Action{0}, Action{1}});
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        qsim::quantum_reflect_select(dist, flags, ReflectionConfig{}, qsim::GroverConfig{}, rng));
  }
}
BENCHMARK(BM_QuantumSelect);

void BM_ClassicalSelect(benchmark::State& state) {
  ActionValues q;
  for (int c = 0; c < kCols; ++c) q[Action{c}] = 0.1 * c - 0.3;
  auto dist = boltzmann_distribution(q, 1.0);
  FlagSet flags = FlagSet::of({Action{0}, Action{1}});
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(classical_reflect_select(dist, flags, ReflectionConfig{}, rng));
}
BENCHMARK(BM_ClassicalSelect);

void BM_TrainBatch(benchmark::State& state) {
  Rng rng(2);
  std::vector<TrainingPair> pairs;
  for (int i = 0; i < 256; ++i) {
    Board b;
    int player = 1;
    for (int p = 0; p < 10 && !is_terminal(outcome(b)); ++p) {
      auto legal = legal_actions(b);
      b = apply_action(b, legal[uniform_index(rng, legal.size())], player);
      player = -player;
    }
    pairs.push_back(TrainingPair{b, uniform01(rng) - 0.5});
  }
  TrainingConfig cfg;
  cfg.epochs = 1;
  QNetwork net(3);
  for (auto _ : state) benchmark::DoNotOptimize(train_batch(net, pairs, cfg, rng));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pairs.size()));
}
BENCHMARK(BM_TrainBatch);

void BM_TrainingGame(benchmark::State& state) {
  auto cfg = ExperimentConfig::defaults(Role::Player1, PolicyKind::QuantumTags);
  cfg.train_episodes = 10;
  cfg.training.batch_games = 10;
  cfg.test_episodes = 0;
  for (auto _ : state) benchmark::DoNotOptimize(train_run(cfg, 1).metrics.states_explored);
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_TrainingGame)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
