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

#ifndef ADVTRAIN_EXPERIMENTS_H_
#define ADVTRAIN_EXPERIMENTS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "advtrain/game.h"
#include "advtrain/random_game.h"
#include "advtrain/training.h"

namespace advtrain {

// Where the game (or games) of an experiment come from.
struct GameSource {
  enum class Kind { kBuiltinRps, kRandom, kFile };
  Kind kind = Kind::kBuiltinRps;
  std::string path;       // kFile
  RandomGameSpec spec;    // kRandom
  int count = 1;          // kRandom: games use seeds root_seed + i
};

struct RpsChecks {
  int window = 100;                   // trailing iterates inspected
  double min_oracle_max = 0.05;       // raw, every iterate in the window
  double min_oracle_best = 0.01;      // raw, best iterate
  double baseline_min_mean = 0.1;     // raw, window mean for each baseline
  double two_timescale_gap = 0.05;    // raw, |avg(two-timescale) - avg(GAMin)|
};

struct TimescaleChecks {
  double compare_kappa = 32.0;
  double reference_kappa = 1.0;
  double min_win_fraction = 0.9;      // compare strictly below reference
  double gap = 0.05;                  // raw, |avg(compare) - avg(min oracle)|
  double min_close_fraction = 0.8;
};

struct CertificationSettings {
  int instances = 200;
  int max_states = 6;
  int max_actions = 4;
  std::vector<double> gammas = {0.5, 0.9, 0.99};
  std::vector<double> eps = {0.0, 0.1, 0.3, 0.7, 1.0};
  int probe_pairs = 100;              // per gamma class
  // Gradient-domination probes need a mismatch estimate from enumeration, so
  // they run on smaller games.
  int domination_instances = 20;
  int domination_max_states = 3;
  int domination_max_actions = 3;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  GameSource game;
  // "uniform", "random" (seeded per game) or a policy file path.
  std::string benign = "uniform";
  double eps = 1.0;
  std::vector<double> defense_eps = {0.3, 0.7, 1.0};
  std::vector<double> attack_eps = {0.0, 0.3, 0.7, 1.0};
  double eta_victim = 0.01;
  double kappa = 32.0;
  int iterations = 2000;
  // timescale-study runs every ratio. rps-benchmark runs every ratio above 1
  // with eta_attacker = eta_victim and eta_victim / kappa for the victim.
  std::vector<double> kappas = {1.0, 32.0};
  // The victim starts uniform and the attacker from a seeded random draw.
  TrainingOptions training = {InitMode::kUniform, InitMode::kRandom,
                              kDefaultBestResponseTol};
  SelectionRule selection = SelectionRule::kSampled;
  Tolerances tolerances;
  std::string victim_path;  // attack
  RpsChecks rps_checks;
  TimescaleChecks timescale_checks;
  CertificationSettings certification;
};

// Parses a JSON config document after applying `overrides`, each a
// (dotted.key.path, value) pair. Values are read as JSON when they parse and
// as plain strings otherwise. Throws std::invalid_argument on unknown keys,
// wrong types or broken invariants.
ExperimentConfig ParseExperimentConfig(
    std::string_view text,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  // Reported but never affects the exit status.
  bool informational = false;
};

struct ExperimentResult {
  std::vector<Check> checks;
  std::vector<std::string> files;  // written outputs, in creation order
  bool AllPassed() const;
};

// Each runner writes its CSVs under config.output_dir (created if missing).
ExperimentResult RunRpsBenchmark(const ExperimentConfig& config);
ExperimentResult RunTimescaleStudy(const ExperimentConfig& config);
ExperimentResult RunBudgetGrid(const ExperimentConfig& config);
ExperimentResult RunBoundCertification(const ExperimentConfig& config);
ExperimentResult RunAttack(const ExperimentConfig& config);

// Dispatches on config.experiment.
ExperimentResult RunExperiment(const ExperimentConfig& config);

// Resolves a game argument: "builtin:rps" or a path to a game file.
MarkovGame ResolveGame(const std::string& source);

}  // namespace advtrain

#endif  // ADVTRAIN_EXPERIMENTS_H_
