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

#include "advtrain/gradients.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "advtrain/evaluation.h"

namespace advtrain {
namespace {

void CheckInputs(const MarkovGame& game, const Policy& victim,
                 const CoupledPolicy& coupled) {
  RequireValid(game);
  RequireVictimPolicy(game, victim);
  RequireAttackerPolicy(game, coupled.benign);
  RequireAttackerPolicy(game, coupled.adversarial);
}

Eigen::MatrixXd Mixture(const CoupledPolicy& coupled) {
  return (1.0 - coupled.budget) * coupled.benign.probs() +
         coupled.budget * coupled.adversarial.probs();
}

}  // namespace

GradientPair Gradients(const MarkovGame& game, const Policy& victim,
                       const CoupledPolicy& coupled) {
  CheckInputs(game, victim, coupled);
  const Eigen::MatrixXd mix = Mixture(coupled);
  const Eigen::MatrixXd& nu = victim.probs();
  const Eigen::VectorXd visitation = internal::Visitation(game, nu, mix);
  const Eigen::VectorXd values = internal::StateValues(game, nu, mix);
  const QTable q = internal::QFromStateValues(game, values);

  const int n = game.num_states();
  const int nv = game.num_actions_victim();
  const int na = game.num_actions_attacker();
  const double horizon = 1.0 / (1.0 - game.gamma());
  GradientPair out{{Eigen::MatrixXd::Zero(n, nv)},
                   {Eigen::MatrixXd::Zero(n, na)},
                   0.0};
  for (int s = 0; s < n; ++s) {
    const double weight = visitation(s) * horizon;
    for (int av = 0; av < nv; ++av) {
      for (int aa = 0; aa < na; ++aa) {
        const double qv = q(s, av, aa);
        out.victim.per_state_action(s, av) += weight * mix(s, aa) * qv;
        out.attacker.per_state_action(s, aa) += weight * nu(s, av) * qv;
      }
    }
  }
  out.attacker.per_state_action *= coupled.budget;
  const Eigen::Map<const Eigen::VectorXd> rho(game.initial_dist().data(), n);
  out.value = rho.dot(values);
  return out;
}

PolicyGradient VictimGradient(const MarkovGame& game, const Policy& victim,
                              const CoupledPolicy& coupled) {
  return Gradients(game, victim, coupled).victim;
}

PolicyGradient AttackerGradient(const MarkovGame& game, const Policy& victim,
                                const CoupledPolicy& coupled) {
  return Gradients(game, victim, coupled).attacker;
}

PolicyGradient FiniteDifferenceGradient(const MarkovGame& game,
                                        const Policy& victim,
                                        const CoupledPolicy& coupled,
                                        Agent which, double step) {
  CheckInputs(game, victim, coupled);
  if (!(step > 0.0)) {
    throw std::invalid_argument("finite-difference step must be positive");
  }
  const double eps = coupled.budget;
  Eigen::MatrixXd nu = victim.probs();
  Eigen::MatrixXd adv = coupled.adversarial.probs();
  const Eigen::MatrixXd& benign = coupled.benign.probs();
  auto evaluate = [&]() {
    return internal::Value(game, nu, (1.0 - eps) * benign + eps * adv);
  };
  Eigen::MatrixXd& coords = which == Agent::kVictim ? nu : adv;
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(coords.rows(), coords.cols());
  for (Eigen::Index s = 0; s < coords.rows(); ++s) {
    for (Eigen::Index a = 0; a < coords.cols(); ++a) {
      const double center = coords(s, a);
      const double hi = std::min(1.0, center + step);
      const double lo = std::max(0.0, center - step);
      coords(s, a) = hi;
      const double f_hi = evaluate();
      coords(s, a) = lo;
      const double f_lo = evaluate();
      coords(s, a) = center;
      grad(s, a) = (f_hi - f_lo) / (hi - lo);
    }
  }
  return {grad};
}

Eigen::VectorXd ProjectSimplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n == 0) throw std::invalid_argument("ProjectSimplex: empty vector");
  if (!v.allFinite()) {
    throw std::invalid_argument("ProjectSimplex: non-finite entry");
  }
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return v(a) > v(b); });
  double running = 0.0;
  double threshold = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    running += v(order[static_cast<size_t>(k)]);
    const double candidate = (running - 1.0) / static_cast<double>(k + 1);
    // The support is the longest sorted prefix whose entries stay above the
    // running threshold; k = 0 always qualifies.
    if (k == 0 || v(order[static_cast<size_t>(k)]) - candidate > 0.0) {
      threshold = candidate;
    } else {
      break;
    }
  }
  return (v.array() - threshold).max(0.0).matrix();
}

Policy ProjectPolicy(const Eigen::MatrixXd& rows) {
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index s = 0; s < rows.rows(); ++s) {
    out.row(s) = ProjectSimplex(rows.row(s).transpose()).transpose();
  }
  return Policy(std::move(out));
}

}  // namespace advtrain
