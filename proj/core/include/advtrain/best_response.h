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

#ifndef ADVTRAIN_BEST_RESPONSE_H_
#define ADVTRAIN_BEST_RESPONSE_H_

#include <vector>

#include "advtrain/game.h"

namespace advtrain {

inline constexpr double kDefaultBestResponseTol = 1e-8;

struct BestResponse {
  Policy policy;  // deterministic, lowest index among tied actions
  double value;   // exact value of the original game under the response
};

// Min oracle. Folds the coupling into the game, marginalises the fixed victim
// and runs value iteration on the resulting single-agent MDP until the Bellman
// residual is at most tol * (1 - gamma) / gamma. `value` is the victim's value
// against the realized coupling (1 - eps) benign + eps response.
//
// With eps == 0 every adversarial policy is optimal; the uniform policy is
// returned by convention.
BestResponse BestResponseAttacker(const MarkovGame& game, const Policy& victim,
                                  const Policy& benign, double eps,
                                  double tol = kDefaultBestResponseTol);

// Max oracle for the victim against a fixed realized attacker policy.
BestResponse BestResponseVictim(const MarkovGame& game,
                                const Policy& attacker_realized,
                                double tol = kDefaultBestResponseTol);

// Expl(victim) = -min over adversarial policies of the coupled value. Lower
// means more robust.
double Exploitability(const MarkovGame& game, const Policy& victim,
                      const Policy& benign, double eps,
                      double tol = kDefaultBestResponseTol);

struct NeReport {
  double value = 0.0;          // J(victim*, attacker*)
  double victim_gap = 0.0;     // max_v' J(v', a*) - J(v*, a*), >= 0
  double attacker_gap = 0.0;   // J(v*, a*) - min_a' J(v*, a'), >= 0
  double exploitability = 0.0; // Expl(v*)
  double best_challenger_exploitability = 0.0;
  int challengers = 0;
  bool is_equilibrium = false;       // both gaps <= tol
  bool minimizes_exploitability = false;  // Expl(v*) <= Expl(v') + tol for all challengers
};

// Checks both equilibrium inequalities through best responses on each side and
// compares Expl(victim*) against every challenger victim policy.
NeReport VerifyNeRobustness(const MarkovGame& game, const Policy& benign,
                            double eps, const Policy& victim_star,
                            const Policy& attacker_star,
                            const std::vector<Policy>& challengers,
                            double tol = kDefaultBestResponseTol);

}  // namespace advtrain

#endif  // ADVTRAIN_BEST_RESPONSE_H_
