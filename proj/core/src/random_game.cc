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

#include "advtrain/random_game.h"

#include <stdexcept>
#include <vector>

namespace advtrain {
namespace {

void FillDirichlet(double concentration, std::mt19937_64& rng, double* out,
                   int n) {
  std::gamma_distribution<double> draw(concentration, 1.0);
  for (;;) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      out[i] = draw(rng);
      sum += out[i];
    }
    if (sum > 0.0) {
      for (int i = 0; i < n; ++i) out[i] /= sum;
      return;
    }
  }
}

}  // namespace

std::mt19937_64 SplitRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

MarkovGame GenerateRandomGame(const RandomGameSpec& spec, std::uint64_t seed) {
  if (spec.n_states <= 0 || spec.n_actions_victim <= 0 ||
      spec.n_actions_attacker <= 0) {
    throw std::invalid_argument("RandomGameSpec: sizes must be positive");
  }
  if (!(spec.dirichlet_concentration > 0.0)) {
    throw std::invalid_argument("RandomGameSpec: concentration must be positive");
  }
  const int n = spec.n_states;
  const size_t joint =
      static_cast<size_t>(n) * spec.n_actions_victim * spec.n_actions_attacker;
  std::mt19937_64 rng(seed);
  std::vector<double> transition(joint * n);
  for (size_t row = 0; row < joint; ++row) {
    FillDirichlet(spec.dirichlet_concentration, rng, &transition[row * n], n);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> reward(joint);
  for (double& r : reward) r = unit(rng);
  std::vector<double> rho(static_cast<size_t>(n), 1.0 / n);
  return MarkovGame(n, spec.n_actions_victim, spec.n_actions_attacker,
                    std::move(transition), std::move(reward), std::move(rho),
                    spec.gamma);
}

MarkovGame BuiltinRps() {
  constexpr double kPayoff[3][3] = {{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}};
  std::vector<double> reward;
  for (const auto& row : kPayoff) {
    for (double p : row) reward.push_back((p + 1.0) / 2.0);
  }
  return MarkovGame(1, 3, 3, std::vector<double>(9, 1.0), std::move(reward),
                    {1.0}, 0.0, RewardRescale{2.0, -1.0});
}

Policy RandomPolicy(int n_states, int n_actions, std::mt19937_64& rng,
                    double concentration) {
  Eigen::MatrixXd probs(n_states, n_actions);
  std::vector<double> row(static_cast<size_t>(n_actions));
  for (int s = 0; s < n_states; ++s) {
    FillDirichlet(concentration, rng, row.data(), n_actions);
    for (int a = 0; a < n_actions; ++a) probs(s, a) = row[a];
  }
  return Policy(std::move(probs));
}

}  // namespace advtrain
