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

#include "advtrain/evaluation.h"

#include <algorithm>
#include <stdexcept>

namespace advtrain {
namespace internal {

Eigen::MatrixXd JointTransition(const MarkovGame& game,
                                const Eigen::MatrixXd& victim,
                                const Eigen::MatrixXd& attacker) {
  const int n = game.num_states();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    for (int av = 0; av < game.num_actions_victim(); ++av) {
      for (int aa = 0; aa < game.num_actions_attacker(); ++aa) {
        const double w = victim(s, av) * attacker(s, aa);
        if (w == 0.0) continue;
        for (int next = 0; next < n; ++next) {
          p(next, s) += w * game.transition(s, av, aa, next);
        }
      }
    }
  }
  return p;
}

Eigen::VectorXd MarginalReward(const MarkovGame& game,
                               const Eigen::MatrixXd& victim,
                               const Eigen::MatrixXd& attacker) {
  const int n = game.num_states();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (int s = 0; s < n; ++s) {
    for (int av = 0; av < game.num_actions_victim(); ++av) {
      for (int aa = 0; aa < game.num_actions_attacker(); ++aa) {
        r(s) += victim(s, av) * attacker(s, aa) * game.reward(s, av, aa);
      }
    }
  }
  return r;
}

Eigen::VectorXd SolveDiscounted(const Eigen::MatrixXd& m, double gamma,
                                const Eigen::VectorXd& b) {
  const Eigen::Index n = m.rows();
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - gamma * m;
  Eigen::VectorXd x = lhs.partialPivLu().solve(b);
  const double residual = (lhs * x - b).lpNorm<Eigen::Infinity>();
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  if (!x.allFinite() || residual > kDefaultTolerances.solve * scale) {
    throw std::runtime_error("linear solve failed: residual too large");
  }
  return x;
}

Eigen::VectorXd Visitation(const MarkovGame& game,
                           const Eigen::MatrixXd& victim,
                           const Eigen::MatrixXd& attacker) {
  const Eigen::Map<const Eigen::VectorXd> rho(game.initial_dist().data(),
                                              game.num_states());
  const double g = game.gamma();
  return (1.0 - g) * SolveDiscounted(JointTransition(game, victim, attacker), g,
                                     rho);
}

Eigen::VectorXd StateValues(const MarkovGame& game,
                            const Eigen::MatrixXd& victim,
                            const Eigen::MatrixXd& attacker) {
  // Row s of P_pi^T is the next-state distribution from s.
  const Eigen::MatrixXd row_stochastic =
      JointTransition(game, victim, attacker).transpose();
  return SolveDiscounted(row_stochastic, game.gamma(),
                         MarginalReward(game, victim, attacker));
}

double Value(const MarkovGame& game, const Eigen::MatrixXd& victim,
             const Eigen::MatrixXd& attacker) {
  const Eigen::Map<const Eigen::VectorXd> rho(game.initial_dist().data(),
                                              game.num_states());
  return rho.dot(StateValues(game, victim, attacker));
}

QTable QFromStateValues(const MarkovGame& game, const Eigen::VectorXd& values) {
  const int n = game.num_states();
  QTable q(n, game.num_actions_victim(), game.num_actions_attacker());
  for (int s = 0; s < n; ++s) {
    for (int av = 0; av < game.num_actions_victim(); ++av) {
      for (int aa = 0; aa < game.num_actions_attacker(); ++aa) {
        double future = 0.0;
        for (int next = 0; next < n; ++next) {
          future += game.transition(s, av, aa, next) * values(next);
        }
        q(s, av, aa) = game.reward(s, av, aa) + game.gamma() * future;
      }
    }
  }
  return q;
}

}  // namespace internal

namespace {

void CheckInputs(const MarkovGame& game, const Policy& victim,
                 const Policy& attacker) {
  RequireValid(game);
  RequireVictimPolicy(game, victim);
  RequireAttackerPolicy(game, attacker);
}

}  // namespace

Eigen::MatrixXd JointTransitionMatrix(const MarkovGame& game,
                                      const Policy& victim,
                                      const Policy& attacker) {
  CheckInputs(game, victim, attacker);
  return internal::JointTransition(game, victim.probs(), attacker.probs());
}

OccupancyMeasure StateVisitation(const MarkovGame& game, const Policy& victim,
                                 const Policy& attacker) {
  CheckInputs(game, victim, attacker);
  return {internal::Visitation(game, victim.probs(), attacker.probs())};
}

Eigen::VectorXd StateValues(const MarkovGame& game, const Policy& victim,
                            const Policy& attacker) {
  CheckInputs(game, victim, attacker);
  return internal::StateValues(game, victim.probs(), attacker.probs());
}

double Value(const MarkovGame& game, const Policy& victim,
             const Policy& attacker) {
  CheckInputs(game, victim, attacker);
  return internal::Value(game, victim.probs(), attacker.probs());
}

QTable QFunction(const MarkovGame& game, const Policy& victim,
                 const Policy& attacker) {
  CheckInputs(game, victim, attacker);
  return internal::QFromStateValues(
      game, internal::StateValues(game, victim.probs(), attacker.probs()));
}

MarkovGame FoldCoupling(const MarkovGame& game, const Policy& benign,
                        double eps) {
  RequireValid(game);
  RequireAttackerPolicy(game, benign);
  RequireBudget(eps);
  const int n = game.num_states();
  const int nv = game.num_actions_victim();
  const int na = game.num_actions_attacker();
  std::vector<double> transition(game.transition_data().size());
  std::vector<double> reward(game.reward_data().size());
  std::vector<double> benign_next(n);
  for (int s = 0; s < n; ++s) {
    for (int av = 0; av < nv; ++av) {
      double benign_reward = 0.0;
      std::fill(benign_next.begin(), benign_next.end(), 0.0);
      for (int b = 0; b < na; ++b) {
        const double w = benign(s, b);
        benign_reward += w * game.reward(s, av, b);
        for (int next = 0; next < n; ++next) {
          benign_next[next] += w * game.transition(s, av, b, next);
        }
      }
      for (int aa = 0; aa < na; ++aa) {
        const size_t joint = (static_cast<size_t>(s) * nv + av) * na + aa;
        // Clamped so a convex combination of [0, 1] rewards cannot leave the
        // range by an ulp.
        reward[joint] = std::clamp(
            (1.0 - eps) * benign_reward + eps * game.reward(s, av, aa), 0.0,
            1.0);
        for (int next = 0; next < n; ++next) {
          transition[joint * n + next] =
              (1.0 - eps) * benign_next[next] +
              eps * game.transition(s, av, aa, next);
        }
      }
    }
  }
  return MarkovGame(n, nv, na, std::move(transition), std::move(reward),
                    game.initial_dist(), game.gamma(), game.rescale());
}

}  // namespace advtrain
