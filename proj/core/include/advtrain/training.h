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

#ifndef ADVTRAIN_TRAINING_H_
#define ADVTRAIN_TRAINING_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "advtrain/best_response.h"
#include "advtrain/game.h"

namespace advtrain {

// Per-iteration step sizes for both agents.
struct LearningSchedule {
  std::vector<double> eta_victim;
  std::vector<double> eta_attacker;

  // eta_attacker = kappa * eta_victim at every iteration.
  static LearningSchedule Constant(double eta_victim, double kappa,
                                   int iterations);

  int iterations() const { return static_cast<int>(eta_victim.size()); }
  // Smallest eta_attacker / eta_victim over the run.
  double MinRatio() const;
  // Throws std::invalid_argument unless both sequences have the same positive
  // length and every rate is positive and finite.
  void Validate() const;
};

// The single-timescale dynamics, plus GAMin (gradient ascent against a min
// oracle, identical to TrainMinOracle).
enum class Method { kSgda, kAgda, kSibr, kAibr, kGaMin };

std::string_view MethodName(Method method);
// Accepts "SGDA", "AGDA", "SIBR", "AIBR", "GAMin" (case-insensitive); throws
// std::invalid_argument otherwise.
Method ParseMethod(std::string_view name);

enum class InitMode { kUniform, kRandom };

struct TrainingOptions {
  // Starting policies. kRandom draws each row from a flat Dirichlet using the
  // run's seed.
  InitMode victim_init = InitMode::kUniform;
  InitMode attacker_init = InitMode::kUniform;
  double best_response_tol = kDefaultBestResponseTol;
};

struct IterationRecord {
  Policy victim;            // pi_v^t
  Policy attacker;          // adversarial component paired with pi_v^t
  double value;             // J(pi_v^t, attacker)
  double victim_grad_norm;  // ||grad_v J|| at that pair
  double exploitability;    // Expl(pi_v^t)
  double eta_victim;
  double eta_attacker;
};

enum class SelectionRule { kSampled, kBest, kLast };

std::string_view SelectionRuleName(SelectionRule rule);
SelectionRule ParseSelectionRule(std::string_view name);

struct TrainingTrace {
  std::string method;
  std::vector<IterationRecord> records;

  // Output rule of both training algorithms: iterate t drawn with probability
  // proportional to eta_victim^t, using the run's seed.
  int sampled_iteration = 0;
  // Lowest exploitability over the trace (first one on ties).
  int best_iteration = 0;
  // sum_t eta^t Expl^t / sum_t eta^t.
  double weighted_average_exploitability = 0.0;

  const Policy& Selected(SelectionRule rule = SelectionRule::kSampled) const;
  double best_exploitability() const {
    return records[best_iteration].exploitability;
  }
};

// Algorithm with a min oracle: at every iteration the attacker plays an exact
// best response to the current victim, and the victim takes one projected
// gradient ascent step against it.
TrainingTrace TrainMinOracle(const MarkovGame& game, const Policy& benign,
                             double eps, const LearningSchedule& schedule,
                             std::uint64_t seed,
                             const TrainingOptions& options = {});

// Two-timescale algorithm: simultaneous projected gradient steps from the same
// iterate, attacker descending with eta_attacker, victim ascending with
// eta_victim. Requires eta_attacker >= eta_victim at every iteration.
TrainingTrace TrainTwoTimescale(const MarkovGame& game, const Policy& benign,
                                double eps, const LearningSchedule& schedule,
                                std::uint64_t seed,
                                const TrainingOptions& options = {});

// Baseline dynamics. Gradient methods use the schedule's two rates (equal
// rates reproduce the single-step-size formulation). Best-response methods
// ignore the rates except for the output draw.
TrainingTrace RunBaseline(const MarkovGame& game, const Policy& benign,
                          double eps, Method method,
                          const LearningSchedule& schedule, std::uint64_t seed,
                          const TrainingOptions& options = {});

}  // namespace advtrain

#endif  // ADVTRAIN_TRAINING_H_
