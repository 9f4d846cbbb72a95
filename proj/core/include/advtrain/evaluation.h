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

#ifndef ADVTRAIN_EVALUATION_H_
#define ADVTRAIN_EVALUATION_H_

#include <vector>

#include <Eigen/Dense>

#include "advtrain/game.h"

// Exact evaluation of a fixed joint policy. All quantities come from dense
// linear solves against (I - gamma * P_pi); the attacker policy passed here is
// always the policy the hijacked agent actually executes (the realized
// coupling, when an attack is involved).

namespace advtrain {

// Discounted, normalised state-visitation distribution d_rho.
struct OccupancyMeasure {
  Eigen::VectorXd dist;

  double operator[](int s) const { return dist(s); }
  int size() const { return static_cast<int>(dist.size()); }
};

// Q(s, a_v, a_a) under a fixed joint policy, flattened [s][a_v][a_a].
class QTable {
 public:
  QTable(int n_states, int n_victim, int n_attacker)
      : n_victim_(n_victim),
        n_attacker_(n_attacker),
        data_(static_cast<size_t>(n_states) * n_victim * n_attacker, 0.0) {}

  double& operator()(int s, int av, int aa) {
    return data_[(static_cast<size_t>(s) * n_victim_ + av) * n_attacker_ + aa];
  }
  double operator()(int s, int av, int aa) const {
    return data_[(static_cast<size_t>(s) * n_victim_ + av) * n_attacker_ + aa];
  }
  int num_actions_victim() const { return n_victim_; }
  int num_actions_attacker() const { return n_attacker_; }

 private:
  int n_victim_;
  int n_attacker_;
  std::vector<double> data_;
};

// P_pi(s', s) = sum_{a_v, a_a} pi_v(a_v|s) pi_a(a_a|s) P(s'|s, a_v, a_a).
// Columns are distributions over the next state.
Eigen::MatrixXd JointTransitionMatrix(const MarkovGame& game,
                                      const Policy& victim,
                                      const Policy& attacker);

// d = (1 - gamma) (I - gamma P_pi)^{-1} rho.
OccupancyMeasure StateVisitation(const MarkovGame& game, const Policy& victim,
                                 const Policy& attacker);

// Per-state discounted values V(s) = E[sum_t gamma^t r_t | s_0 = s].
Eigen::VectorXd StateValues(const MarkovGame& game, const Policy& victim,
                            const Policy& attacker);

// V_rho = sum_s rho(s) V(s). Lies in [0, 1 / (1 - gamma)].
double Value(const MarkovGame& game, const Policy& victim,
             const Policy& attacker);

QTable QFunction(const MarkovGame& game, const Policy& victim,
                 const Policy& attacker);

// Builds the game whose rewards and dynamics already average over the benign
// policy with weight (1 - eps):
//   r_mix(s, a_v, a_a) = (1 - eps) sum_b r(s, a_v, b) benign(b|s) + eps r(s, a_v, a_a)
//   P_mix likewise.
// Playing adversarial policy p in the folded game is equivalent to playing the
// realized coupling in the original one.
MarkovGame FoldCoupling(const MarkovGame& game, const Policy& benign,
                        double eps);

namespace internal {

// Unchecked variants over raw (n_states x n_actions) matrices. Rows need not
// be distributions, which lets finite differences probe the ambient cube.
Eigen::MatrixXd JointTransition(const MarkovGame& game,
                                const Eigen::MatrixXd& victim,
                                const Eigen::MatrixXd& attacker);
Eigen::VectorXd MarginalReward(const MarkovGame& game,
                               const Eigen::MatrixXd& victim,
                               const Eigen::MatrixXd& attacker);
Eigen::VectorXd Visitation(const MarkovGame& game,
                           const Eigen::MatrixXd& victim,
                           const Eigen::MatrixXd& attacker);
Eigen::VectorXd StateValues(const MarkovGame& game,
                            const Eigen::MatrixXd& victim,
                            const Eigen::MatrixXd& attacker);
double Value(const MarkovGame& game, const Eigen::MatrixXd& victim,
             const Eigen::MatrixXd& attacker);
QTable QFromStateValues(const MarkovGame& game, const Eigen::VectorXd& values);

// Solves (I - gamma * m) x = b with partial pivoting and checks the residual.
Eigen::VectorXd SolveDiscounted(const Eigen::MatrixXd& m, double gamma,
                                const Eigen::VectorXd& b);

}  // namespace internal
}  // namespace advtrain

#endif  // ADVTRAIN_EVALUATION_H_
