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

#ifndef ADVTRAIN_GAME_H_
#define ADVTRAIN_GAME_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace advtrain {

// Numerical tolerances shared by the whole library. The defaults are the
// module-level constants; callers that need looser or tighter checks pass
// their own instance.
struct Tolerances {
  // Row sums of probability tables must be within this of 1.
  double stochastic = 1e-12;
  // Residual allowed on every dense linear solve.
  double solve = 1e-10;
  // Two action values closer than this are considered tied.
  double tie = 1e-12;
  // Largest discount accepted. The visitation normalisation degenerates as
  // gamma approaches 1, so larger values are refused.
  double max_discount = 0.999;
};

inline constexpr Tolerances kDefaultTolerances{};

// Affine map from the stored ([0, 1]) rewards back to the rewards the game was
// specified in: raw = scale * stored + offset.
struct RewardRescale {
  double scale = 1.0;
  double offset = 0.0;

  double ToRaw(double stored) const { return scale * stored + offset; }
  // Discounted values accumulate the offset once per step.
  double ValueToRaw(double stored_value, double gamma) const {
    return scale * stored_value + offset / (1.0 - gamma);
  }
  // Exploitability is a negated value, so the offset flips sign.
  double ExploitabilityToRaw(double stored_expl, double gamma) const {
    return scale * stored_expl - offset / (1.0 - gamma);
  }
};

// A per-state distribution over one agent's actions, stored as an
// (n_states x n_actions) row-stochastic matrix. Construction validates the
// rows and throws std::invalid_argument when any row is not a distribution.
class Policy {
 public:
  explicit Policy(Eigen::MatrixXd probs,
                  const Tolerances& tol = kDefaultTolerances);

  static Policy Uniform(int n_states, int n_actions);
  // One action per state with probability one.
  static Policy Deterministic(const std::vector<int>& actions, int n_actions);
  // Divides each row by its sum. This is the only place rows get rescaled.
  static Policy Normalized(Eigen::MatrixXd weights);

  int num_states() const { return static_cast<int>(probs_.rows()); }
  int num_actions() const { return static_cast<int>(probs_.cols()); }
  double operator()(int s, int a) const { return probs_(s, a); }
  const Eigen::MatrixXd& probs() const { return probs_; }

  bool operator==(const Policy& other) const { return probs_ == other.probs_; }

 private:
  Eigen::MatrixXd probs_;
};

struct Violation {
  std::string kind;    // "shape", "row-stochasticity", "initial-distribution",
                       // "reward-range", "discount"
  std::string detail;  // human readable, names the offending indices
};

// Tabular two-agent Markov game. Agent "victim" picks a_v, the agent the
// attacker may hijack picks a_a. Rewards are the victim's.
//
// The object is immutable. Construction only checks that the containers have
// consistent sizes; semantic invariants are reported by ValidateGame and
// enforced by every evaluation routine through RequireValid.
class MarkovGame {
 public:
  // transition is indexed [s][a_v][a_a][s'] and reward [s][a_v][a_a], both
  // flattened in row-major order.
  MarkovGame(int n_states, int n_actions_victim, int n_actions_attacker,
             std::vector<double> transition, std::vector<double> reward,
             std::vector<double> initial_dist, double gamma,
             std::optional<RewardRescale> rescale = std::nullopt);

  int num_states() const { return n_states_; }
  int num_actions_victim() const { return n_victim_; }
  int num_actions_attacker() const { return n_attacker_; }
  double gamma() const { return gamma_; }
  const std::optional<RewardRescale>& rescale() const { return rescale_; }

  double transition(int s, int av, int aa, int next) const {
    return transition_[((static_cast<size_t>(s) * n_victim_ + av) * n_attacker_ + aa) *
                           n_states_ + next];
  }
  double reward(int s, int av, int aa) const {
    return reward_[(static_cast<size_t>(s) * n_victim_ + av) * n_attacker_ + aa];
  }
  double initial(int s) const { return initial_[s]; }

  const std::vector<double>& transition_data() const { return transition_; }
  const std::vector<double>& reward_data() const { return reward_; }
  const std::vector<double>& initial_dist() const { return initial_; }

  // True when ValidateGame with default tolerances found nothing.
  bool is_valid() const { return default_violations_.empty(); }
  const std::vector<Violation>& default_violations() const {
    return default_violations_;
  }

  bool operator==(const MarkovGame& other) const;

 private:
  int n_states_;
  int n_victim_;
  int n_attacker_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  std::vector<double> initial_;
  double gamma_;
  std::optional<RewardRescale> rescale_;
  std::vector<Violation> default_violations_;
};

// Lists every violated invariant. An empty result means the game is usable.
std::vector<Violation> ValidateGame(const MarkovGame& game,
                                    const Tolerances& tol = kDefaultTolerances);

// Throws std::invalid_argument naming the first violation.
void RequireValid(const MarkovGame& game);

// Throws std::invalid_argument when the policy does not fit the agent's
// action set in `game`.
void RequireVictimPolicy(const MarkovGame& game, const Policy& policy);
void RequireAttackerPolicy(const MarkovGame& game, const Policy& policy);

// The attacker controls the hijacked agent with probability `budget` at every
// step; otherwise the agent follows its benign policy.
struct CoupledPolicy {
  Policy benign;
  Policy adversarial;
  double budget;

  CoupledPolicy(Policy benign_policy, Policy adversarial_policy, double eps);

  // (1 - budget) * benign + budget * adversarial.
  Policy Realized() const;
};

void RequireBudget(double eps);

}  // namespace advtrain

#endif  // ADVTRAIN_GAME_H_
