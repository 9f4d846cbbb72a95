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

#include "advtrain/best_response.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "advtrain/evaluation.h"

namespace advtrain {
namespace {

// Single-agent MDP with rewards r(s, a) and dynamics p[(s * n_actions + a) *
// n_states + s'].
struct ReducedMdp {
  int n_states;
  int n_actions;
  double gamma;
  Eigen::MatrixXd reward;       // n_states x n_actions
  std::vector<double> dynamics;

  double Backup(int s, int a, const Eigen::VectorXd& v) const {
    const double* row =
        &dynamics[(static_cast<size_t>(s) * n_actions + a) * n_states];
    double future = 0.0;
    for (int next = 0; next < n_states; ++next) future += row[next] * v(next);
    return reward(s, a) + gamma * future;
  }
};

// Attacker's view: the victim policy is folded into rewards and dynamics, and
// the coupling with the benign policy is folded in as well.
ReducedMdp AttackerMdp(const MarkovGame& game, const Eigen::MatrixXd& victim,
                       const Eigen::MatrixXd& benign, double eps) {
  const int n = game.num_states();
  const int nv = game.num_actions_victim();
  const int na = game.num_actions_attacker();
  ReducedMdp mdp{n, na, game.gamma(), Eigen::MatrixXd::Zero(n, na),
                 std::vector<double>(static_cast<size_t>(n) * na * n, 0.0)};
  std::vector<double> benign_next(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s) {
    for (int av = 0; av < nv; ++av) {
      const double w = victim(s, av);
      if (w == 0.0) continue;
      double benign_reward = 0.0;
      std::fill(benign_next.begin(), benign_next.end(), 0.0);
      for (int b = 0; b < na; ++b) {
        benign_reward += benign(s, b) * game.reward(s, av, b);
        for (int next = 0; next < n; ++next) {
          benign_next[next] += benign(s, b) * game.transition(s, av, b, next);
        }
      }
      for (int aa = 0; aa < na; ++aa) {
        mdp.reward(s, aa) +=
            w * ((1.0 - eps) * benign_reward + eps * game.reward(s, av, aa));
        double* row = &mdp.dynamics[(static_cast<size_t>(s) * na + aa) * n];
        for (int next = 0; next < n; ++next) {
          row[next] += w * ((1.0 - eps) * benign_next[next] +
                            eps * game.transition(s, av, aa, next));
        }
      }
    }
  }
  return mdp;
}

ReducedMdp VictimMdp(const MarkovGame& game, const Eigen::MatrixXd& attacker) {
  const int n = game.num_states();
  const int nv = game.num_actions_victim();
  const int na = game.num_actions_attacker();
  ReducedMdp mdp{n, nv, game.gamma(), Eigen::MatrixXd::Zero(n, nv),
                 std::vector<double>(static_cast<size_t>(n) * nv * n, 0.0)};
  for (int s = 0; s < n; ++s) {
    for (int av = 0; av < nv; ++av) {
      double* row = &mdp.dynamics[(static_cast<size_t>(s) * nv + av) * n];
      for (int aa = 0; aa < na; ++aa) {
        const double w = attacker(s, aa);
        if (w == 0.0) continue;
        mdp.reward(s, av) += w * game.reward(s, av, aa);
        for (int next = 0; next < n; ++next) {
          row[next] += w * game.transition(s, av, aa, next);
        }
      }
    }
  }
  return mdp;
}

// Lowest action index whose backup is within `tie` of the best one.
std::vector<int> Greedy(const ReducedMdp& mdp, const Eigen::VectorXd& v,
                        bool minimize, double tie) {
  std::vector<int> actions(static_cast<size_t>(mdp.n_states), 0);
  std::vector<double> q(static_cast<size_t>(mdp.n_actions));
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) q[a] = mdp.Backup(s, a, v);
    const double best = minimize ? *std::min_element(q.begin(), q.end())
                                 : *std::max_element(q.begin(), q.end());
    for (int a = 0; a < mdp.n_actions; ++a) {
      if (std::abs(q[a] - best) <= tie) {
        actions[s] = a;
        break;
      }
    }
  }
  return actions;
}

// Exact values of a deterministic policy in the reduced MDP.
Eigen::VectorXd Evaluate(const ReducedMdp& mdp, const std::vector<int>& actions) {
  const int n = mdp.n_states;
  Eigen::MatrixXd p(n, n);
  Eigen::VectorXd r(n);
  for (int s = 0; s < n; ++s) {
    r(s) = mdp.reward(s, actions[s]);
    const double* row =
        &mdp.dynamics[(static_cast<size_t>(s) * mdp.n_actions + actions[s]) * n];
    for (int next = 0; next < n; ++next) p(s, next) = row[next];
  }
  return internal::SolveDiscounted(p, mdp.gamma, r);
}

std::vector<int> SolveMdp(const ReducedMdp& mdp, bool minimize, double tol) {
  const double tie = kDefaultTolerances.tie;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.n_states);
  const double stop = mdp.gamma > 0.0
                          ? tol * (1.0 - mdp.gamma) / mdp.gamma
                          : std::numeric_limits<double>::infinity();
  // Value iteration; converges geometrically at rate gamma <= 0.999.
  for (;;) {
    Eigen::VectorXd next(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) {
      double best = minimize ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.n_actions; ++a) {
        const double q = mdp.Backup(s, a, v);
        best = minimize ? std::min(best, q) : std::max(best, q);
      }
      next(s) = best;
    }
    const double residual = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (residual <= stop) break;
  }
  std::vector<int> actions = Greedy(mdp, v, minimize, tie);
  // Policy-improvement polish: the greedy policy from an approximate value is
  // made exactly optimal. Switching requires a strict improvement beyond the
  // tie tolerance, so the loop cannot cycle.
  for (int round = 0; round < 100; ++round) {
    const Eigen::VectorXd exact = Evaluate(mdp, actions);
    bool changed = false;
    for (int s = 0; s < mdp.n_states; ++s) {
      const double current = mdp.Backup(s, actions[s], exact);
      int chosen = actions[s];
      double best = current;
      for (int a = 0; a < mdp.n_actions; ++a) {
        const double q = mdp.Backup(s, a, exact);
        const bool better = minimize ? q < best - tie : q > best + tie;
        if (better) {
          best = q;
          chosen = a;
        }
      }
      if (chosen != actions[s]) {
        actions[s] = chosen;
        changed = true;
      }
    }
    if (!changed) break;
  }
  // Ties are resolved against exact values so the lowest-index rule does not
  // depend on value-iteration noise.
  return Greedy(mdp, Evaluate(mdp, actions), minimize, tie);
}

void RequireTol(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw std::invalid_argument("best-response tolerance must be positive");
  }
}

}  // namespace

BestResponse BestResponseAttacker(const MarkovGame& game, const Policy& victim,
                                  const Policy& benign, double eps,
                                  double tol) {
  RequireValid(game);
  RequireVictimPolicy(game, victim);
  RequireAttackerPolicy(game, benign);
  RequireBudget(eps);
  RequireTol(tol);
  if (eps == 0.0) {
    return {Policy::Uniform(game.num_states(), game.num_actions_attacker()),
            internal::Value(game, victim.probs(), benign.probs())};
  }
  const ReducedMdp mdp = AttackerMdp(game, victim.probs(), benign.probs(), eps);
  Policy response = Policy::Deterministic(SolveMdp(mdp, /*minimize=*/true, tol),
                                          game.num_actions_attacker());
  const double value = internal::Value(
      game, victim.probs(),
      (1.0 - eps) * benign.probs() + eps * response.probs());
  return {std::move(response), value};
}

BestResponse BestResponseVictim(const MarkovGame& game,
                                const Policy& attacker_realized, double tol) {
  RequireValid(game);
  RequireAttackerPolicy(game, attacker_realized);
  RequireTol(tol);
  const ReducedMdp mdp = VictimMdp(game, attacker_realized.probs());
  Policy response = Policy::Deterministic(
      SolveMdp(mdp, /*minimize=*/false, tol), game.num_actions_victim());
  const double value =
      internal::Value(game, response.probs(), attacker_realized.probs());
  return {std::move(response), value};
}

double Exploitability(const MarkovGame& game, const Policy& victim,
                      const Policy& benign, double eps, double tol) {
  return -BestResponseAttacker(game, victim, benign, eps, tol).value;
}

NeReport VerifyNeRobustness(const MarkovGame& game, const Policy& benign,
                            double eps, const Policy& victim_star,
                            const Policy& attacker_star,
                            const std::vector<Policy>& challengers,
                            double tol) {
  RequireAttackerPolicy(game, attacker_star);
  const CoupledPolicy coupled(benign, attacker_star, eps);
  const Policy realized = coupled.Realized();
  NeReport report;
  report.value = Value(game, victim_star, realized);
  report.victim_gap =
      std::max(0.0, BestResponseVictim(game, realized, tol).value - report.value);
  const BestResponse attack =
      BestResponseAttacker(game, victim_star, benign, eps, tol);
  report.attacker_gap = std::max(0.0, report.value - attack.value);
  report.exploitability = -attack.value;
  report.is_equilibrium = report.victim_gap <= tol && report.attacker_gap <= tol;

  report.challengers = static_cast<int>(challengers.size());
  report.best_challenger_exploitability = std::numeric_limits<double>::infinity();
  report.minimizes_exploitability = true;
  for (const Policy& challenger : challengers) {
    const double expl = Exploitability(game, challenger, benign, eps, tol);
    report.best_challenger_exploitability =
        std::min(report.best_challenger_exploitability, expl);
    if (report.exploitability > expl + tol) {
      report.minimizes_exploitability = false;
    }
  }
  return report;
}

}  // namespace advtrain
