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

#include "advtrain/training.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "advtrain/gradients.h"
#include "advtrain/random_game.h"

namespace advtrain {
namespace {

constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kOutputStream = 1;

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct StartingPoint {
  Policy victim;
  Policy attacker;
};

StartingPoint Initialize(const MarkovGame& game, std::uint64_t seed,
                         const TrainingOptions& options) {
  std::mt19937_64 rng = SplitRng(seed, kInitStream);
  const int n = game.num_states();
  // Victim first, so the victim draw does not depend on the attacker mode.
  Policy victim = options.victim_init == InitMode::kRandom
                      ? RandomPolicy(n, game.num_actions_victim(), rng)
                      : Policy::Uniform(n, game.num_actions_victim());
  Policy attacker = options.attacker_init == InitMode::kRandom
                        ? RandomPolicy(n, game.num_actions_attacker(), rng)
                        : Policy::Uniform(n, game.num_actions_attacker());
  return {std::move(victim), std::move(attacker)};
}

void CheckCommon(const MarkovGame& game, const Policy& benign, double eps,
                 const LearningSchedule& schedule) {
  RequireValid(game);
  RequireAttackerPolicy(game, benign);
  RequireBudget(eps);
  schedule.Validate();
}

Policy Ascend(const Policy& p, double eta, const PolicyGradient& g) {
  return ProjectPolicy(p.probs() + eta * g.per_state_action);
}

Policy Descend(const Policy& p, double eta, const PolicyGradient& g) {
  return ProjectPolicy(p.probs() - eta * g.per_state_action);
}

// Fills in the output draw and summary statistics.
void Finalize(TrainingTrace& trace, std::uint64_t seed) {
  double weight_sum = 0.0;
  double weighted = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < trace.records.size(); ++t) {
    const IterationRecord& r = trace.records[t];
    weight_sum += r.eta_victim;
    weighted += r.eta_victim * r.exploitability;
    if (r.exploitability < best) {
      best = r.exploitability;
      trace.best_iteration = static_cast<int>(t);
    }
  }
  trace.weighted_average_exploitability = weighted / weight_sum;

  std::mt19937_64 rng = SplitRng(seed, kOutputStream);
  const double u =
      std::uniform_real_distribution<double>(0.0, weight_sum)(rng);
  double cumulative = 0.0;
  trace.sampled_iteration = static_cast<int>(trace.records.size()) - 1;
  for (size_t t = 0; t < trace.records.size(); ++t) {
    cumulative += trace.records[t].eta_victim;
    if (u < cumulative) {
      trace.sampled_iteration = static_cast<int>(t);
      break;
    }
  }
}

enum class GradientOrder { kSimultaneous, kAlternating };

TrainingTrace GradientPlay(const MarkovGame& game, const Policy& benign,
                           double eps, const LearningSchedule& schedule,
                           std::uint64_t seed, const TrainingOptions& options,
                           GradientOrder order, std::string method) {
  StartingPoint start = Initialize(game, seed, options);
  Policy victim = std::move(start.victim);
  Policy attacker = std::move(start.attacker);
  TrainingTrace trace{std::move(method), {}};
  trace.records.reserve(static_cast<size_t>(schedule.iterations()));
  for (int t = 0; t < schedule.iterations(); ++t) {
    const double eta_v = schedule.eta_victim[t];
    const double eta_a = schedule.eta_attacker[t];
    const GradientPair g =
        Gradients(game, victim, CoupledPolicy(benign, attacker, eps));
    const double expl = Exploitability(game, victim, benign, eps,
                                       options.best_response_tol);
    trace.records.push_back(
        {victim, attacker, g.value, g.victim.Norm(), expl, eta_v, eta_a});
    Policy next_attacker = Descend(attacker, eta_a, g.attacker);
    if (order == GradientOrder::kSimultaneous) {
      victim = Ascend(victim, eta_v, g.victim);
    } else {
      const GradientPair after =
          Gradients(game, victim, CoupledPolicy(benign, next_attacker, eps));
      victim = Ascend(victim, eta_v, after.victim);
    }
    attacker = std::move(next_attacker);
  }
  Finalize(trace, seed);
  return trace;
}

enum class ResponseOrder { kSimultaneous, kAlternating };

TrainingTrace BestResponsePlay(const MarkovGame& game, const Policy& benign,
                               double eps, const LearningSchedule& schedule,
                               std::uint64_t seed,
                               const TrainingOptions& options,
                               ResponseOrder order, std::string method) {
  StartingPoint start = Initialize(game, seed, options);
  Policy victim = std::move(start.victim);
  Policy attacker = std::move(start.attacker);
  const double tol = options.best_response_tol;
  TrainingTrace trace{std::move(method), {}};
  trace.records.reserve(static_cast<size_t>(schedule.iterations()));
  for (int t = 0; t < schedule.iterations(); ++t) {
    const GradientPair g =
        Gradients(game, victim, CoupledPolicy(benign, attacker, eps));
    BestResponse attack = BestResponseAttacker(game, victim, benign, eps, tol);
    trace.records.push_back({victim, attacker, g.value, g.victim.Norm(),
                             -attack.value, schedule.eta_victim[t],
                             schedule.eta_attacker[t]});
    // The victim answers either the attacker it saw at time t or the one that
    // was just computed.
    const Policy& opponent =
        order == ResponseOrder::kSimultaneous ? attacker : attack.policy;
    BestResponse defense = BestResponseVictim(
        game, CoupledPolicy(benign, opponent, eps).Realized(), tol);
    attacker = std::move(attack.policy);
    victim = std::move(defense.policy);
  }
  Finalize(trace, seed);
  return trace;
}

}  // namespace

LearningSchedule LearningSchedule::Constant(double eta_victim, double kappa,
                                            int iterations) {
  if (iterations < 1) {
    throw std::invalid_argument("LearningSchedule: iterations must be >= 1");
  }
  LearningSchedule schedule;
  schedule.eta_victim.assign(static_cast<size_t>(iterations), eta_victim);
  schedule.eta_attacker.assign(static_cast<size_t>(iterations),
                               kappa * eta_victim);
  schedule.Validate();
  return schedule;
}

double LearningSchedule::MinRatio() const {
  double ratio = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < eta_victim.size(); ++t) {
    ratio = std::min(ratio, eta_attacker[t] / eta_victim[t]);
  }
  return ratio;
}

void LearningSchedule::Validate() const {
  if (eta_victim.empty() || eta_victim.size() != eta_attacker.size()) {
    throw std::invalid_argument(
        "LearningSchedule: rate sequences must be non-empty and equally long");
  }
  for (size_t t = 0; t < eta_victim.size(); ++t) {
    if (!(eta_victim[t] > 0.0) || !std::isfinite(eta_victim[t]) ||
        !(eta_attacker[t] > 0.0) || !std::isfinite(eta_attacker[t])) {
      throw std::invalid_argument("LearningSchedule: rates must be positive");
    }
  }
}

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kSgda: return "SGDA";
    case Method::kAgda: return "AGDA";
    case Method::kSibr: return "SIBR";
    case Method::kAibr: return "AIBR";
    case Method::kGaMin: return "GAMin";
  }
  return "unknown";
}

Method ParseMethod(std::string_view name) {
  const std::string key = Lower(name);
  for (Method m : {Method::kSgda, Method::kAgda, Method::kSibr, Method::kAibr,
                   Method::kGaMin}) {
    if (Lower(MethodName(m)) == key) return m;
  }
  throw std::invalid_argument("unknown method: " + std::string(name));
}

std::string_view SelectionRuleName(SelectionRule rule) {
  switch (rule) {
    case SelectionRule::kSampled: return "sampled";
    case SelectionRule::kBest: return "best";
    case SelectionRule::kLast: return "last";
  }
  return "unknown";
}

SelectionRule ParseSelectionRule(std::string_view name) {
  const std::string key = Lower(name);
  for (SelectionRule r :
       {SelectionRule::kSampled, SelectionRule::kBest, SelectionRule::kLast}) {
    if (SelectionRuleName(r) == key) return r;
  }
  throw std::invalid_argument("unknown selection rule: " + std::string(name));
}

const Policy& TrainingTrace::Selected(SelectionRule rule) const {
  switch (rule) {
    case SelectionRule::kBest: return records[best_iteration].victim;
    case SelectionRule::kLast: return records.back().victim;
    case SelectionRule::kSampled: break;
  }
  return records[sampled_iteration].victim;
}

TrainingTrace TrainMinOracle(const MarkovGame& game, const Policy& benign,
                             double eps, const LearningSchedule& schedule,
                             std::uint64_t seed,
                             const TrainingOptions& options) {
  CheckCommon(game, benign, eps, schedule);
  StartingPoint start = Initialize(game, seed, options);
  Policy victim = std::move(start.victim);
  TrainingTrace trace{"GAMin", {}};
  trace.records.reserve(static_cast<size_t>(schedule.iterations()));
  for (int t = 0; t < schedule.iterations(); ++t) {
    const double eta = schedule.eta_victim[t];
    BestResponse attack = BestResponseAttacker(game, victim, benign, eps,
                                               options.best_response_tol);
    const GradientPair g =
        Gradients(game, victim, CoupledPolicy(benign, attack.policy, eps));
    Policy next = Ascend(victim, eta, g.victim);
    trace.records.push_back({std::move(victim), std::move(attack.policy),
                             g.value, g.victim.Norm(), -attack.value, eta,
                             schedule.eta_attacker[t]});
    victim = std::move(next);
  }
  Finalize(trace, seed);
  return trace;
}

TrainingTrace TrainTwoTimescale(const MarkovGame& game, const Policy& benign,
                                double eps, const LearningSchedule& schedule,
                                std::uint64_t seed,
                                const TrainingOptions& options) {
  CheckCommon(game, benign, eps, schedule);
  if (schedule.MinRatio() < 1.0) {
    throw std::invalid_argument(
        "two-timescale training needs eta_attacker >= eta_victim");
  }
  return GradientPlay(game, benign, eps, schedule, seed, options,
                      GradientOrder::kSimultaneous, "two-timescale");
}

TrainingTrace RunBaseline(const MarkovGame& game, const Policy& benign,
                          double eps, Method method,
                          const LearningSchedule& schedule, std::uint64_t seed,
                          const TrainingOptions& options) {
  CheckCommon(game, benign, eps, schedule);
  const std::string name(MethodName(method));
  switch (method) {
    case Method::kSgda:
      return GradientPlay(game, benign, eps, schedule, seed, options,
                          GradientOrder::kSimultaneous, name);
    case Method::kAgda:
      return GradientPlay(game, benign, eps, schedule, seed, options,
                          GradientOrder::kAlternating, name);
    case Method::kSibr:
      return BestResponsePlay(game, benign, eps, schedule, seed, options,
                              ResponseOrder::kSimultaneous, name);
    case Method::kAibr:
      return BestResponsePlay(game, benign, eps, schedule, seed, options,
                              ResponseOrder::kAlternating, name);
    case Method::kGaMin:
      return TrainMinOracle(game, benign, eps, schedule, seed, options);
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace advtrain
