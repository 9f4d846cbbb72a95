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

#ifndef ADVTRAIN_RANDOM_GAME_H_
#define ADVTRAIN_RANDOM_GAME_H_

#include <cstdint>
#include <random>

#include "advtrain/game.h"

namespace advtrain {

struct RandomGameSpec {
  int n_states = 3;
  int n_actions_victim = 3;
  int n_actions_attacker = 3;
  // Every transition row is drawn from a symmetric Dirichlet with this
  // concentration. Rewards are uniform on [0, 1] and rho is uniform.
  double dirichlet_concentration = 1.0;
  double gamma = 0.9;
};

// Deterministic in (spec, seed); the result passes ValidateGame.
MarkovGame GenerateRandomGame(const RandomGameSpec& spec, std::uint64_t seed);

// Rock-paper-scissors as a one-state game with gamma = 0. The payoff matrix
// [[0, 1, -1], [-1, 0, 1], [1, -1, 0]] is stored as (P + 1) / 2 with rescale
// metadata {scale = 2, offset = -1}.
MarkovGame BuiltinRps();

// Rows drawn from a symmetric Dirichlet.
Policy RandomPolicy(int n_states, int n_actions, std::mt19937_64& rng,
                    double concentration = 1.0);

// Independent generator for stream `stream` of a run seeded with `seed`.
std::mt19937_64 SplitRng(std::uint64_t seed, std::uint64_t stream);

}  // namespace advtrain

#endif  // ADVTRAIN_RANDOM_GAME_H_
