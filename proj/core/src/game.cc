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

#include "advtrain/game.h"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace advtrain {
namespace {

void CheckRows(const Eigen::MatrixXd& probs, double tol) {
  if (probs.rows() == 0 || probs.cols() == 0) {
    throw std::invalid_argument("Policy: empty probability table");
  }
  for (Eigen::Index s = 0; s < probs.rows(); ++s) {
    double sum = 0.0;
    for (Eigen::Index a = 0; a < probs.cols(); ++a) {
      const double p = probs(s, a);
      if (!std::isfinite(p) || p < 0.0) {
        std::ostringstream msg;
        msg << "Policy: entry (" << s << ", " << a << ") = " << p
            << " is not a probability";
        throw std::invalid_argument(msg.str());
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream msg;
      msg << "Policy: row " << s << " sums to " << sum;
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

Policy::Policy(Eigen::MatrixXd probs, const Tolerances& tol)
    : probs_(std::move(probs)) {
  CheckRows(probs_, tol.stochastic);
}

Policy Policy::Uniform(int n_states, int n_actions) {
  if (n_states <= 0 || n_actions <= 0) {
    throw std::invalid_argument("Policy::Uniform: sizes must be positive");
  }
  return Policy(Eigen::MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions));
}

Policy Policy::Deterministic(const std::vector<int>& actions, int n_actions) {
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(actions.size()), n_actions);
  for (size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= n_actions) {
      throw std::invalid_argument("Policy::Deterministic: action out of range");
    }
    probs(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
  }
  return Policy(std::move(probs));
}

Policy Policy::Normalized(Eigen::MatrixXd weights) {
  for (Eigen::Index s = 0; s < weights.rows(); ++s) {
    const double sum = weights.row(s).sum();
    if (!(sum > 0.0)) {
      throw std::invalid_argument("Policy::Normalized: row without mass");
    }
    weights.row(s) /= sum;
  }
  return Policy(std::move(weights));
}

MarkovGame::MarkovGame(int n_states, int n_actions_victim,
                       int n_actions_attacker, std::vector<double> transition,
                       std::vector<double> reward,
                       std::vector<double> initial_dist, double gamma,
                       std::optional<RewardRescale> rescale)
    : n_states_(n_states),
      n_victim_(n_actions_victim),
      n_attacker_(n_actions_attacker),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      initial_(std::move(initial_dist)),
      gamma_(gamma),
      rescale_(rescale) {
  if (n_states_ <= 0 || n_victim_ <= 0 || n_attacker_ <= 0) {
    throw std::invalid_argument("MarkovGame: sizes must be positive");
  }
  const size_t joint = static_cast<size_t>(n_states_) * n_victim_ * n_attacker_;
  if (transition_.size() != joint * n_states_) {
    throw std::invalid_argument("MarkovGame: transition tensor has wrong size");
  }
  if (reward_.size() != joint) {
    throw std::invalid_argument("MarkovGame: reward tensor has wrong size");
  }
  if (initial_.size() != static_cast<size_t>(n_states_)) {
    throw std::invalid_argument("MarkovGame: initial distribution has wrong size");
  }
  default_violations_ = ValidateGame(*this);
}

bool MarkovGame::operator==(const MarkovGame& other) const {
  const bool same_rescale =
      rescale_.has_value() == other.rescale_.has_value() &&
      (!rescale_ || (rescale_->scale == other.rescale_->scale &&
                     rescale_->offset == other.rescale_->offset));
  return n_states_ == other.n_states_ && n_victim_ == other.n_victim_ &&
         n_attacker_ == other.n_attacker_ && gamma_ == other.gamma_ &&
         transition_ == other.transition_ && reward_ == other.reward_ &&
         initial_ == other.initial_ && same_rescale;
}

std::vector<Violation> ValidateGame(const MarkovGame& game,
                                    const Tolerances& tol) {
  std::vector<Violation> out;
  const int n = game.num_states();
  for (int s = 0; s < n; ++s) {
    for (int av = 0; av < game.num_actions_victim(); ++av) {
      for (int aa = 0; aa < game.num_actions_attacker(); ++aa) {
        double sum = 0.0;
        bool negative = false;
        for (int next = 0; next < n; ++next) {
          const double p = game.transition(s, av, aa, next);
          if (!std::isfinite(p) || p < 0.0) negative = true;
          sum += p;
        }
        if (negative || !(std::abs(sum - 1.0) <= tol.stochastic)) {
          std::ostringstream msg;
          msg << "transition(" << s << ", " << av << ", " << aa
              << ") sums to " << sum << (negative ? " with negative entries" : "");
          out.push_back({"row-stochasticity", msg.str()});
        }
        const double r = game.reward(s, av, aa);
        if (!(r >= 0.0 && r <= 1.0)) {
          std::ostringstream msg;
          msg << "reward(" << s << ", " << av << ", " << aa << ") = " << r
              << " outside [0, 1]";
          out.push_back({"reward-range", msg.str()});
        }
      }
    }
  }
  double rho_sum = 0.0;
  bool rho_negative = false;
  for (int s = 0; s < n; ++s) {
    const double p = game.initial(s);
    if (!std::isfinite(p) || p < 0.0) rho_negative = true;
    rho_sum += p;
  }
  if (rho_negative || !(std::abs(rho_sum - 1.0) <= tol.stochastic)) {
    std::ostringstream msg;
    msg << "initial distribution sums to " << rho_sum
        << (rho_negative ? " with negative entries" : "");
    out.push_back({"initial-distribution", msg.str()});
  }
  const double g = game.gamma();
  if (!(g >= 0.0 && g <= tol.max_discount)) {
    std::ostringstream msg;
    msg << "gamma = " << g << " outside [0, " << tol.max_discount << "]";
    out.push_back({"discount", msg.str()});
  }
  return out;
}

void RequireValid(const MarkovGame& game) {
  if (!game.is_valid()) {
    const Violation& v = game.default_violations().front();
    throw std::invalid_argument("invalid game: " + v.kind + ": " + v.detail);
  }
}

void RequireVictimPolicy(const MarkovGame& game, const Policy& policy) {
  if (policy.num_states() != game.num_states() ||
      policy.num_actions() != game.num_actions_victim()) {
    throw std::invalid_argument("victim policy shape does not match the game");
  }
}

void RequireAttackerPolicy(const MarkovGame& game, const Policy& policy) {
  if (policy.num_states() != game.num_states() ||
      policy.num_actions() != game.num_actions_attacker()) {
    throw std::invalid_argument("attacker policy shape does not match the game");
  }
}

void RequireBudget(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("attack budget must lie in [0, 1]");
  }
}

CoupledPolicy::CoupledPolicy(Policy benign_policy, Policy adversarial_policy,
                             double eps)
    : benign(std::move(benign_policy)),
      adversarial(std::move(adversarial_policy)),
      budget(eps) {
  RequireBudget(eps);
  if (benign.num_states() != adversarial.num_states() ||
      benign.num_actions() != adversarial.num_actions()) {
    throw std::invalid_argument("CoupledPolicy: component shapes differ");
  }
}

Policy CoupledPolicy::Realized() const {
  return Policy((1.0 - budget) * benign.probs() + budget * adversarial.probs());
}

}  // namespace advtrain
