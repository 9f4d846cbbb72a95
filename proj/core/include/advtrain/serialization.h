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

#ifndef ADVTRAIN_SERIALIZATION_H_
#define ADVTRAIN_SERIALIZATION_H_

#include <string>
#include <string_view>

#include "advtrain/game.h"

namespace advtrain {

// Games are stored as JSON documents:
//
//   {
//     "n_states": 2, "n_actions_victim": 2, "n_actions_attacker": 3,
//     "gamma": 0.9,
//     "rho": [0.5, 0.5],
//     "reward": [[[...]]],          // [s][a_v][a_a]
//     "transition": [[[[...]]]],    // [s][a_v][a_a][s']
//     "reward_rescale": {"scale": 2, "offset": -1}   // optional
//   }
//
// Policies are nested arrays [s][a]. Doubles are written in their shortest
// round-trip form, so serialization is exact and deterministic.
//
// Parsing throws std::invalid_argument on malformed documents or mismatched
// shapes. A game that parses but breaks an invariant is returned as is, so
// callers can report violations through ValidateGame.

std::string SerializeGame(const MarkovGame& game);
MarkovGame ParseGame(std::string_view text);

std::string SerializePolicy(const Policy& policy);
Policy ParsePolicy(std::string_view text);

// File helpers. Throw std::runtime_error on I/O failure.
std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, std::string_view contents);
MarkovGame LoadGame(const std::string& path);
void SaveGame(const std::string& path, const MarkovGame& game);
Policy LoadPolicy(const std::string& path);
void SavePolicy(const std::string& path, const Policy& policy);

}  // namespace advtrain

#endif  // ADVTRAIN_SERIALIZATION_H_
