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

#ifndef ADVTRAIN_GRADIENTS_H_
#define ADVTRAIN_GRADIENTS_H_

#include <Eigen/Dense>

#include "advtrain/game.h"

namespace advtrain {

enum class Agent { kVictim, kAttacker };

// Partial derivatives of J_eps(victim, adversarial) with respect to one
// agent's direct (tabular) policy parameters. Same shape as that agent's
// Policy.
struct PolicyGradient {
  Eigen::MatrixXd per_state_action;

  double Norm() const { return per_state_action.norm(); }
};

struct GradientPair {
  PolicyGradient victim;
  PolicyGradient attacker;
  double value;  // J at the evaluation point
};

// dJ/dv(s, a) = d(s) / (1 - gamma) * E_{b ~ mix(.|s)} Q(s, a, b), where d and
// Q are taken under the realized coupling `mix`.
PolicyGradient VictimGradient(const MarkovGame& game, const Policy& victim,
                              const CoupledPolicy& coupled);

// dJ/dalpha(s, b) = eps * d(s) / (1 - gamma) * E_{a ~ victim(.|s)} Q(s, a, b).
// The eps factor is the chain rule through the mixture.
PolicyGradient AttackerGradient(const MarkovGame& game, const Policy& victim,
                                const CoupledPolicy& coupled);

// Both gradients and the value from one occupancy / Q evaluation.
GradientPair Gradients(const MarkovGame& game, const Policy& victim,
                       const CoupledPolicy& coupled);

// Central differences of J over raw policy coordinates, for verification only.
// Each coordinate is perturbed by +-step, clipped to [0, 1]; rows are not
// renormalised, since J extends to the ambient cube through the same formulas.
PolicyGradient FiniteDifferenceGradient(const MarkovGame& game,
                                        const Policy& victim,
                                        const CoupledPolicy& coupled,
                                        Agent which, double step = 1e-6);

// Euclidean projection onto the probability simplex (sort and threshold).
// Throws std::invalid_argument on an empty or non-finite input.
Eigen::VectorXd ProjectSimplex(const Eigen::VectorXd& v);

// Row-wise projection; the result is a valid Policy.
Policy ProjectPolicy(const Eigen::MatrixXd& rows);

}  // namespace advtrain

#endif  // ADVTRAIN_GRADIENTS_H_
