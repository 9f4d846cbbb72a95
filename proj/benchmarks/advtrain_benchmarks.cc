// Copyright 2026 The advtrain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include "advtrain/best_response.h"
#include "advtrain/evaluation.h"
#include "advtrain/gradients.h"
#include "advtrain/random_game.h"
#include "advtrain/training.h"
#include "benchmark/benchmark.h"

namespace advtrain {
namespace {

struct Instance {
  MarkovGame game;
  Policy victim;
  Policy benign;
  Policy adversarial;
};

Instance MakeInstance(int n_states, int n_actions, double gamma = 0.9) {
  RandomGameSpec spec;
  spec.n_states = n_states;
  spec.n_actions_victim = n_actions;
  spec.n_actions_attacker = n_actions;
  spec.gamma = gamma;
  std::mt19937_64 rng(1);
  MarkovGame game = GenerateRandomGame(spec, 7);
  Policy victim = RandomPolicy(n_states, n_actions, rng);
  Policy benign = RandomPolicy(n_states, n_actions, rng);
  Policy adversarial = RandomPolicy(n_states, n_actions, rng);
  return {std::move(game), std::move(victim), std::move(benign), std::move(adversarial)};
}

void BM_Value(benchmark::State& state) {
  const Instance in = MakeInstance(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Value(in.game, in.victim, in.adversarial));
  }
}
BENCHMARK(BM_Value)->Arg(3)->Arg(10)->Arg(50);

void BM_Gradients(benchmark::State& state) {
  const Instance in = MakeInstance(static_cast<int>(state.range(0)), 4);
  const CoupledPolicy coupled(in.benign, in.adversarial, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Gradients(in.game, in.victim, coupled));
  }
}
BENCHMARK(BM_Gradients)->Arg(3)->Arg(10)->Arg(50);

void BM_BestResponseAttacker(benchmark::State& state) {
  const Instance in = MakeInstance(static_cast<int>(state.range(0)), 4,
                                   state.range(1) / 100.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BestResponseAttacker(in.game, in.victim, in.benign, 0.7));
  }
}
BENCHMARK(BM_BestResponseAttacker)->Args({3, 90})->Args({10, 90})->Args({10, 99});

void BM_ProjectSimplex(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(state.range(0));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ProjectSimplex(v));
  }
}
BENCHMARK(BM_ProjectSimplex)->Arg(3)->Arg(64)->Arg(1024);

void BM_TwoTimescaleTraining(benchmark::State& state) {
  const Instance in = MakeInstance(3, 3);
  const LearningSchedule schedule =
      LearningSchedule::Constant(0.01, 32.0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(TrainTwoTimescale(in.game, in.benign, 1.0, schedule, 0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TwoTimescaleTraining)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MinOracleTraining(benchmark::State& state) {
  const Instance in = MakeInstance(3, 3);
  const LearningSchedule schedule =
      LearningSchedule::Constant(0.01, 1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(TrainMinOracle(in.game, in.benign, 1.0, schedule, 0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MinOracleTraining)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace advtrain

BENCHMARK_MAIN();
