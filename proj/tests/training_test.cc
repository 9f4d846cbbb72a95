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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "advtrain/best_response.h"
#include "advtrain/evaluation.h"
#include "advtrain/gradients.h"
#include "advtrain/random_game.h"
#include "advtrain/training.h"
#include "gtest/gtest.h"
#include "test_games.h"

namespace advtrain {
namespace {

using testing::InteriorPolicy;
using testing::RandomGame;

double RawExpl(const MarkovGame& g, double expl) {
  return g.rescale() ? g.rescale()->ExploitabilityToRaw(expl, g.gamma()) : expl;
}

void ExpectSameTrace(const TrainingTrace& a, const TrainingTrace& b) {
  ASSERT_EQ(a.records.size(), b.records.size());
  for (size_t t = 0; t < a.records.size(); ++t) {
    ASSERT_TRUE(a.records[t].victim == b.records[t].victim) << "t=" << t;
    ASSERT_TRUE(a.records[t].attacker == b.records[t].attacker) << "t=" << t;
    ASSERT_EQ(a.records[t].exploitability, b.records[t].exploitability);
    ASSERT_EQ(a.records[t].value, b.records[t].value);
  }
  EXPECT_EQ(a.sampled_iteration, b.sampled_iteration);
  EXPECT_EQ(a.best_iteration, b.best_iteration);
  EXPECT_EQ(a.weighted_average_exploitability, b.weighted_average_exploitability);
}

TEST(LearningScheduleTest, ConstantScalesAttackerRate) {
  const LearningSchedule s = LearningSchedule::Constant(0.01, 32.0, 5);
  EXPECT_EQ(s.iterations(), 5);
  EXPECT_DOUBLE_EQ(s.eta_attacker[3], 0.32);
  EXPECT_DOUBLE_EQ(s.MinRatio(), 32.0);
}

TEST(LearningScheduleTest, RejectsBadRates) {
  EXPECT_THROW(LearningSchedule::Constant(0.1, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(LearningSchedule::Constant(0.0, 1.0, 3), std::invalid_argument);
  EXPECT_THROW(LearningSchedule::Constant(-0.1, 1.0, 3), std::invalid_argument);
  LearningSchedule ragged{{0.1, 0.1}, {0.1}};
  EXPECT_THROW(ragged.Validate(), std::invalid_argument);
  LearningSchedule nan{{0.1}, {std::nan("")}};
  EXPECT_THROW(nan.Validate(), std::invalid_argument);
}

TEST(MethodTest, ParsesNamesCaseInsensitively) {
  EXPECT_EQ(ParseMethod("sgda"), Method::kSgda);
  EXPECT_EQ(ParseMethod("AIBR"), Method::kAibr);
  EXPECT_EQ(ParseMethod("gamin"), Method::kGaMin);
  EXPECT_THROW(ParseMethod("adam"), std::invalid_argument);
  EXPECT_EQ(ParseSelectionRule("Best"), SelectionRule::kBest);
  EXPECT_THROW(ParseSelectionRule("median"), std::invalid_argument);
}

TEST(TwoTimescaleTest, RejectsSlowAttacker) {
  const MarkovGame g = RandomGame(2, 2, 2, 0.9, 0);
  EXPECT_THROW(TrainTwoTimescale(g, Policy::Uniform(2, 2), 0.5,
                                 LearningSchedule::Constant(0.1, 0.5, 10), 0),
               std::invalid_argument);
}

TEST(TwoTimescaleTest, UnitRatioIsSimultaneousGda) {
  const MarkovGame g = RandomGame(3, 3, 2, 0.9, 4);
  const Policy benign = Policy::Uniform(3, 2);
  const LearningSchedule s = LearningSchedule::Constant(0.05, 1.0, 200);
  TrainingOptions options;
  options.attacker_init = InitMode::kRandom;
  const TrainingTrace two = TrainTwoTimescale(g, benign, 0.7, s, 11, options);
  const TrainingTrace sgda = RunBaseline(g, benign, 0.7, Method::kSgda, s, 11, options);
  ExpectSameTrace(two, sgda);
}

TEST(TrainingTest, RunsAreReproducible) {
  const MarkovGame g = RandomGame(3, 3, 3, 0.9, 6);
  const Policy benign = Policy::Uniform(3, 3);
  const LearningSchedule s = LearningSchedule::Constant(0.01, 32.0, 300);
  TrainingOptions options;
  options.victim_init = InitMode::kRandom;
  options.attacker_init = InitMode::kRandom;
  ExpectSameTrace(TrainTwoTimescale(g, benign, 1.0, s, 3, options),
                  TrainTwoTimescale(g, benign, 1.0, s, 3, options));
  ExpectSameTrace(TrainMinOracle(g, benign, 1.0, s, 3, options),
                  TrainMinOracle(g, benign, 1.0, s, 3, options));
  for (Method m : {Method::kSgda, Method::kAgda, Method::kSibr, Method::kAibr}) {
    ExpectSameTrace(RunBaseline(g, benign, 1.0, m, s, 3, options),
                    RunBaseline(g, benign, 1.0, m, s, 3, options));
  }
}

TEST(TrainingTest, DifferentSeedsGiveDifferentStarts) {
  const MarkovGame g = RandomGame(3, 3, 3, 0.9, 6);
  TrainingOptions options;
  options.victim_init = InitMode::kRandom;
  const LearningSchedule s = LearningSchedule::Constant(0.01, 1.0, 1);
  const Policy benign = Policy::Uniform(3, 3);
  EXPECT_FALSE(TrainMinOracle(g, benign, 1.0, s, 1, options).records[0].victim ==
               TrainMinOracle(g, benign, 1.0, s, 2, options).records[0].victim);
}

// With a single adversarial action the attacker has nothing to choose, so the
// min-oracle run must be plain projected gradient ascent.
TEST(MinOracleTest, SingleAttackerActionIsProjectedAscent) {
  const MarkovGame g = RandomGame(3, 3, 1, 0.9, 8);
  const Policy benign = Policy::Uniform(3, 1);
  const double eta = 0.01;
  const int steps = 300;
  const TrainingTrace trace =
      TrainMinOracle(g, benign, 1.0, LearningSchedule::Constant(eta, 1.0, steps), 0);
  Policy victim = Policy::Uniform(3, 3);
  double previous = std::numeric_limits<double>::infinity();
  for (int t = 0; t < steps; ++t) {
    const Eigen::MatrixXd& got = trace.records[t].victim.probs();
    ASSERT_LE((got - victim.probs()).cwiseAbs().maxCoeff(), 1e-12) << "t=" << t;
    const double expl = -Value(g, victim, benign);
    ASSERT_NEAR(trace.records[t].exploitability, expl, 1e-10);
    ASSERT_LE(expl, previous + 1e-12) << "t=" << t;
    previous = expl;
    const GradientPair grad = Gradients(g, victim, CoupledPolicy(benign, benign, 1.0));
    victim = ProjectPolicy(victim.probs() + eta * grad.victim.per_state_action);
  }
}

// Pure best response of the row player (max) or column player (min) in the
// raw payoff matrix, first index on ties.
int PureResponse(const Eigen::Matrix3d& payoff, const Eigen::Vector3d& other, bool row) {
  const Eigen::Vector3d score = row ? Eigen::Vector3d(payoff * other)
                                    : Eigen::Vector3d(-(payoff.transpose() * other));
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (score[i] > score[best] + 1e-12) best = i;
  }
  return best;
}

TEST(BaselineTest, AlternatingBestResponseCyclesOnRps) {
  const MarkovGame rps = BuiltinRps();
  Eigen::Matrix3d payoff;
  payoff << 0, 1, -1, -1, 0, 1, 1, -1, 0;
  const int steps = 30;
  const TrainingTrace trace =
      RunBaseline(rps, Policy::Uniform(1, 3), 1.0, Method::kAibr,
                  LearningSchedule::Constant(0.1, 1.0, steps), 0);
  Eigen::Vector3d x = Eigen::Vector3d::Constant(1.0 / 3.0);
  for (int t = 0; t < steps; ++t) {
    const Eigen::RowVectorXd got = trace.records[t].victim.probs().row(0);
    ASSERT_LE((got.transpose() - x).cwiseAbs().maxCoeff(), 1e-12) << "t=" << t;
    if (t >= 1) EXPECT_NEAR(RawExpl(rps, trace.records[t].exploitability), 1.0, 1e-12);
    const int y = PureResponse(payoff, x, false);
    const int next = PureResponse(payoff, Eigen::Vector3d::Unit(y), true);
    x = Eigen::Vector3d::Unit(next);
  }
  // The victim visits all three pure strategies with period 3.
  for (int t = 1; t + 3 < steps; ++t) {
    EXPECT_TRUE(trace.records[t].victim == trace.records[t + 3].victim);
    EXPECT_FALSE(trace.records[t].victim == trace.records[t + 1].victim);
  }
}

// Gradient play spirals slowly away from the equilibrium; the second half of
// the run stays well above zero exploitability.
TEST(BaselineTest, SimultaneousGradientPlayDoesNotConvergeOnRps) {
  const MarkovGame rps = BuiltinRps();
  TrainingOptions options;
  options.attacker_init = InitMode::kRandom;
  const TrainingTrace trace =
      RunBaseline(rps, Policy::Uniform(1, 3), 1.0, Method::kSgda,
                  LearningSchedule::Constant(0.1, 1.0, 2000), 0, options);
  double lowest = std::numeric_limits<double>::infinity();
  for (size_t t = 1000; t < trace.records.size(); ++t) {
    lowest = std::min(lowest, RawExpl(rps, trace.records[t].exploitability));
  }
  EXPECT_GE(lowest, 0.1);
}

TEST(MinOracleTest, RpsReachesLowExploitability) {
  const MarkovGame rps = BuiltinRps();
  const TrainingTrace trace =
      TrainMinOracle(rps, Policy::Uniform(1, 3), 1.0,
                     LearningSchedule::Constant(0.1, 1.0, 2000), 0);
  EXPECT_LE(RawExpl(rps, trace.best_exploitability()), 0.01);
  double mean = 0.0;
  for (size_t t = 1900; t < 2000; ++t) mean += RawExpl(rps, trace.records[t].exploitability);
  EXPECT_LE(mean / 100.0, 0.1);
}

TEST(MinOracleTest, AverageNearRandomSweepMinimum) {
  const MarkovGame g = RandomGame(3, 3, 3, 0.9, 21);
  const Policy benign = Policy::Uniform(3, 3);
  const double eps = 1.0;
  std::mt19937_64 rng(21);
  double sweep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10000; ++i) {
    sweep = std::min(sweep, Exploitability(g, InteriorPolicy(3, 3, rng), benign, eps));
  }
  const TrainingTrace trace =
      TrainMinOracle(g, benign, eps, LearningSchedule::Constant(0.01, 1.0, 3000), 0);
  EXPECT_LE(trace.weighted_average_exploitability, sweep + 0.05);
}

TEST(TraceTest, SummaryStatisticsMatchRecords) {
  const MarkovGame g = RandomGame(3, 2, 2, 0.9, 2);
  LearningSchedule s;
  for (int t = 0; t < 100; ++t) {
    s.eta_victim.push_back(0.05 / std::sqrt(t + 1.0));
    s.eta_attacker.push_back(0.5 / std::sqrt(t + 1.0));
  }
  const TrainingTrace trace = TrainTwoTimescale(g, Policy::Uniform(3, 2), 0.8, s, 5);
  ASSERT_EQ(trace.records.size(), 100u);
  double weighted = 0.0, total = 0.0;
  int best = 0;
  for (int t = 0; t < 100; ++t) {
    const IterationRecord& r = trace.records[t];
    ASSERT_TRUE(std::isfinite(r.value) && std::isfinite(r.exploitability));
    ASSERT_EQ(r.eta_victim, s.eta_victim[t]);
    ASSERT_EQ(r.eta_attacker, s.eta_attacker[t]);
    ASSERT_GE(r.exploitability, -r.value - 1e-12);
    weighted += r.eta_victim * r.exploitability;
    total += r.eta_victim;
    if (r.exploitability < trace.records[best].exploitability) best = t;
  }
  EXPECT_NEAR(trace.weighted_average_exploitability, weighted / total, 1e-12);
  EXPECT_EQ(trace.best_iteration, best);
  EXPECT_TRUE(trace.Selected(SelectionRule::kBest) == trace.records[best].victim);
  EXPECT_TRUE(trace.Selected(SelectionRule::kLast) == trace.records.back().victim);
  EXPECT_GE(trace.sampled_iteration, 0);
  EXPECT_LT(trace.sampled_iteration, 100);
}

// The sampled output index follows the step-size weights: over many seeds a
// schedule whose first half carries 3/4 of the weight is picked there about
// 3/4 of the time.
TEST(TraceTest, SampledIterateFollowsStepWeights) {
  const MarkovGame g = RandomGame(1, 2, 2, 0.5, 0);
  LearningSchedule s;
  for (int t = 0; t < 10; ++t) {
    s.eta_victim.push_back(t < 5 ? 0.03 : 0.01);
    s.eta_attacker.push_back(0.03);
  }
  int first_half = 0;
  const int runs = 4000;
  for (int seed = 0; seed < runs; ++seed) {
    const TrainingTrace trace = TrainTwoTimescale(g, Policy::Uniform(1, 2), 0.5, s, seed);
    if (trace.sampled_iteration < 5) ++first_half;
  }
  // Binomial standard deviation is about 0.007; allow five of them.
  EXPECT_NEAR(first_half / static_cast<double>(runs), 0.75, 0.035);
}

}  // namespace
}  // namespace advtrain
