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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any selected criterion fails.
//
//   acceptance_test [criterion ...]    criteria 1..8, default all

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "advtrain/best_response.h"
#include "advtrain/csv.h"
#include "advtrain/evaluation.h"
#include "advtrain/experiments.h"
#include "advtrain/gradients.h"
#include "advtrain/random_game.h"
#include "advtrain/serialization.h"
#include "advtrain/training.h"

namespace advtrain {
namespace {

namespace fs = std::filesystem;

// Criterion 1 and 2.
constexpr int kRpsWindow = 100;
constexpr double kRpsMinOracleMax = 0.05;
constexpr double kRpsBaselineMean = 0.1;
constexpr double kRpsBest = 0.01;
constexpr double kRpsSeconds = 5.0;
// Criterion 3.
constexpr int kCertInstances = 200;
constexpr int kCertProbePairs = 100;
constexpr double kSlackTol = -1e-9;
constexpr double kCertSeconds = 60.0;
// Criterion 4.
constexpr int kGradientGames = 50;
constexpr double kFdStep = 1e-6;
constexpr double kFdRelative = 1e-5;
constexpr double kFoldTol = 1e-10;
// Criterion 5.
constexpr int kTimescaleGames = 10;
constexpr int kTimescaleIterations = 5000;
constexpr int kTimescaleMinWins = 9;
constexpr int kTimescaleMinClose = 8;
constexpr double kTimescaleGap = 0.05;
constexpr double kTimescaleSeconds = 120.0;
// Criterion 6.
constexpr double kBrTol = 1e-8;
constexpr double kMaxEnumerated = 1e4;
// Criterion 7.
constexpr int kGridGames = 5;
constexpr double kMonotoneTol = 1e-9;

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path WorkDir(int criterion, const std::string& run) {
  const fs::path dir = fs::temp_directory_path() / "advtrain_acceptance" /
                       ("c" + std::to_string(criterion)) / run;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Quote(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string RpsConfig(const fs::path& out) {
  return R"({"experiment": "rps-benchmark", "seed": 0, "output_dir": )" + Quote(out) +
         R"(, "game": "builtin:rps", "benign": "uniform", "eps": 1.0,
            "schedule": {"eta_victim": 0.1, "iterations": 2000}, "kappas": [64],
            "init": {"victim": "uniform", "attacker": "random"}})";
}

std::string CertConfig(const fs::path& out) {
  return R"({"experiment": "certify-bounds", "seed": 0, "output_dir": )" + Quote(out) +
         R"(, "certification": {"instances": )" + std::to_string(kCertInstances) +
         R"(, "max_states": 6, "max_actions": 4, "gammas": [0.5, 0.9, 0.99],
            "eps": [0, 0.1, 0.3, 0.7, 1], "probe_pairs": )" +
         std::to_string(kCertProbePairs) + "}}";
}

std::string TimescaleConfig(const fs::path& out) {
  return R"({"experiment": "timescale-study", "seed": 0, "output_dir": )" + Quote(out) +
         R"(, "game": {"source": "random", "n_states": 3, "n_actions": 3,
                      "dirichlet_concentration": 1.0, "gamma": 0.9, "count": )" +
         std::to_string(kTimescaleGames) + R"(}, "benign": "uniform", "eps": 1.0,
            "schedule": {"eta_victim": 0.01, "iterations": )" +
         std::to_string(kTimescaleIterations) + R"(}, "kappas": [1, 32]})";
}

std::string GridConfig(const fs::path& out) {
  return R"({"experiment": "budget-grid", "seed": 0, "output_dir": )" + Quote(out) +
         R"(, "game": {"source": "random", "n_states": 3, "n_actions": 3,
                      "dirichlet_concentration": 1.0, "gamma": 0.9, "count": )" +
         std::to_string(kGridGames) + R"(}, "benign": "uniform",
            "defense_eps": [0.3, 0.7, 1.0], "attack_eps": [0.0, 0.3, 0.7, 1.0],
            "schedule": {"eta_victim": 0.01, "kappa": 32, "iterations": 5000}})";
}

double Seconds(const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

std::vector<double> Column(const CsvTable& t, const std::string& name) {
  std::vector<double> out;
  for (size_t i = 0; i < t.rows().size(); ++i) out.push_back(t.Number(i, name));
  return out;
}

Verdict RpsSeparation() {
  const fs::path dir = WorkDir(1, "run");
  const double secs = Seconds([&] { RunExperiment(ParseExperimentConfig(RpsConfig(dir))); });
  Verdict v{true, ""};
  const std::vector<double> gamin =
      Column(ReadCsv((dir / "trace_gamin.csv").string()), "expl_raw");
  const double worst = *std::max_element(gamin.end() - kRpsWindow, gamin.end());
  v.pass &= worst <= kRpsMinOracleMax;
  v.detail += Fmt("GAMin window max %.4g (<= %.2g)", worst, kRpsMinOracleMax);
  for (const char* m : {"sgda", "agda", "sibr", "aibr"}) {
    const std::vector<double> e =
        Column(ReadCsv((dir / (std::string("trace_") + m + ".csv")).string()), "expl_raw");
    double mean = 0.0;
    for (auto it = e.end() - kRpsWindow; it != e.end(); ++it) mean += *it;
    mean /= kRpsWindow;
    v.pass &= mean >= kRpsBaselineMean;
    v.detail += std::string("; ") + m + Fmt(" mean %.4g", mean);
  }
  v.pass &= secs < kRpsSeconds;
  v.detail += Fmt("; %.2f s (< %.0f s)", secs, kRpsSeconds);

  // Both agents uniform is a stationary point of gradient play; report it.
  const MarkovGame rps = BuiltinRps();
  for (Method m : {Method::kSgda, Method::kAgda}) {
    const TrainingTrace t = RunBaseline(rps, Policy::Uniform(1, 3), 1.0, m,
                                        LearningSchedule::Constant(0.1, 1.0, 2000), 0);
    std::printf("INFO criterion 1: %s from uniform/uniform has final raw exploitability %.3g\n",
                t.method.c_str(),
                rps.rescale()->ExploitabilityToRaw(t.records.back().exploitability, 0.0));
  }
  return v;
}

Verdict RpsBestIterate() {
  const fs::path dir = WorkDir(2, "run");
  RunExperiment(ParseExperimentConfig(RpsConfig(dir)));
  const std::vector<double> gamin =
      Column(ReadCsv((dir / "trace_gamin.csv").string()), "expl_raw");
  const auto best = std::min_element(gamin.begin(), gamin.end());
  return {*best <= kRpsBest, Fmt("best raw exploitability %.4g at iteration %.0f (<= %.2g)",
                                 *best, static_cast<double>(best - gamin.begin()), kRpsBest)};
}

Verdict BoundCertification() {
  const fs::path dir = WorkDir(3, "run");
  const double secs =
      Seconds([&] { RunExperiment(ParseExperimentConfig(CertConfig(dir))); });
  const CsvTable t = ReadCsv((dir / "certification.csv").string());
  std::map<std::string, std::pair<int, int>> families;  // passed, total
  for (size_t i = 0; i < t.rows().size(); ++i) {
    const std::string& bound = t.rows()[i][0];
    auto& [passed, total] = families[bound.substr(0, bound.find('['))];
    ++total;
    if (t.Number(i, "rhs") - t.Number(i, "lhs") >= kSlackTol) ++passed;
  }
  Verdict v{secs < kCertSeconds, ""};
  const char* required[] = {"value", "visitation", "marginalized-dynamics-tv",
                            "marginalized-dynamics-kl", "marginalized-dynamics-hellinger",
                            "lipschitz-victim", "lipschitz-attacker", "smoothness-victim",
                            "smoothness-attacker"};
  for (const char* f : required) {
    const auto it = families.find(f);
    const bool ok = it != families.end() && it->second.first == it->second.second &&
                    it->second.second > 0;
    v.pass &= ok;
    v.detail += std::string(f) + " " +
                (it == families.end() ? "missing"
                                      : std::to_string(it->second.first) + "/" +
                                            std::to_string(it->second.second)) +
                "; ";
  }
  for (const auto& [name, count] : families) {
    if (name.rfind("gradient-domination", 0) == 0) {
      v.detail += name + " " + std::to_string(count.first) + "/" +
                  std::to_string(count.second) + " (informational); ";
    }
  }
  v.detail += Fmt("%.2f s (< %.0f s)", secs, kCertSeconds);
  return v;
}

Verdict GradientExactness() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> states(1, 6);
  // A lone action has probability 1, on the edge of the cube, where the
  // clipped difference becomes one-sided.
  std::uniform_int_distribution<int> actions(2, 4);
  const double gammas[] = {0.5, 0.9, 0.99};
  double worst = 0.0;
  double fold = 0.0;
  auto relative = [](const Eigen::MatrixXd& exact, const Eigen::MatrixXd& fd) {
    return (exact - fd).cwiseAbs().maxCoeff() / std::max(exact.cwiseAbs().maxCoeff(), 1e-12);
  };
  for (int i = 0; i < kGradientGames; ++i) {
    RandomGameSpec spec;
    spec.n_states = states(rng);
    spec.n_actions_victim = actions(rng);
    spec.n_actions_attacker = actions(rng);
    spec.gamma = gammas[i % 3];
    const MarkovGame g = GenerateRandomGame(spec, 5000 + i);
    const int n = spec.n_states;
    const Policy victim = RandomPolicy(n, spec.n_actions_victim, rng);
    const Policy benign = RandomPolicy(n, spec.n_actions_attacker, rng);
    const Policy adversarial = RandomPolicy(n, spec.n_actions_attacker, rng);
    for (double eps : {0.3, 1.0}) {
      const CoupledPolicy c(benign, adversarial, eps);
      const GradientPair exact = Gradients(g, victim, c);
      worst = std::max(worst, relative(exact.victim.per_state_action,
                                       FiniteDifferenceGradient(g, victim, c, Agent::kVictim,
                                                                kFdStep).per_state_action));
      worst = std::max(worst, relative(exact.attacker.per_state_action,
                                       FiniteDifferenceGradient(g, victim, c, Agent::kAttacker,
                                                                kFdStep).per_state_action));
      const double folded = Value(FoldCoupling(g, benign, eps), victim, adversarial);
      fold = std::max(fold, std::abs(Value(g, victim, c.Realized()) - folded));
    }
  }
  return {worst <= kFdRelative && fold <= kFoldTol,
          Fmt("max relative error %.3g (<= %.0e); folded-game gap %.3g", worst, kFdRelative,
              fold) +
              Fmt(" (<= %.0e)", kFoldTol)};
}

Verdict TimescaleDefense() {
  const fs::path dir = WorkDir(5, "run");
  const double secs =
      Seconds([&] { RunExperiment(ParseExperimentConfig(TimescaleConfig(dir))); });
  const CsvTable t = ReadCsv((dir / "summary.csv").string());
  std::map<int, std::map<double, double>> avg;
  std::map<int, double> min_oracle;
  for (size_t i = 0; i < t.rows().size(); ++i) {
    const int seed = static_cast<int>(t.Number(i, "game_seed"));
    avg[seed][t.Number(i, "kappa")] = t.Number(i, "avg_expl");
    min_oracle[seed] = t.Number(i, "min_oracle_avg_expl");
  }
  int wins = 0;
  int close = 0;
  for (const auto& [seed, by_kappa] : avg) {
    if (by_kappa.at(32.0) < by_kappa.at(1.0)) ++wins;
    if (std::abs(by_kappa.at(32.0) - min_oracle.at(seed)) <= kTimescaleGap) ++close;
  }
  const bool games_ok = static_cast<int>(avg.size()) == kTimescaleGames;
  return {games_ok && wins >= kTimescaleMinWins && close >= kTimescaleMinClose &&
              secs < kTimescaleSeconds,
          Fmt("(a) kappa 32 below kappa 1 in %.0f/10 (>= 9); (b) within 0.05 of min oracle "
              "in %.0f/10 (>= 8); %.1f s (< 120 s)",
              wins, close, secs)};
}

Verdict BestResponseOracle() {
  // The default suite plus a spread of sizes.
  std::vector<RandomGameSpec> specs;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < 10; ++i) {
    specs.push_back(RandomGameSpec{});
    seeds.push_back(i);
  }
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> states(1, 6);
  std::uniform_int_distribution<int> actions(1, 4);
  for (int i = 0; i < 40; ++i) {
    RandomGameSpec spec;
    spec.n_states = states(rng);
    spec.n_actions_victim = actions(rng);
    spec.n_actions_attacker = actions(rng);
    spec.gamma = i % 2 ? 0.99 : 0.5;
    specs.push_back(spec);
    seeds.push_back(6000 + i);
  }
  double worst = 0.0;
  int checked = 0;
  for (size_t k = 0; k < specs.size(); ++k) {
    const RandomGameSpec& spec = specs[k];
    if (std::pow(spec.n_actions_attacker, spec.n_states) > kMaxEnumerated) continue;
    const MarkovGame g = GenerateRandomGame(spec, seeds[k]);
    const Policy victim = RandomPolicy(spec.n_states, spec.n_actions_victim, rng);
    const Policy benign = RandomPolicy(spec.n_states, spec.n_actions_attacker, rng);
    for (double eps : {0.3, 1.0}) {
      double enumerated = std::numeric_limits<double>::infinity();
      std::vector<int> pick(static_cast<size_t>(spec.n_states), 0);
      for (;;) {
        const Policy adversarial = Policy::Deterministic(pick, spec.n_actions_attacker);
        enumerated = std::min(
            enumerated, Value(g, victim, CoupledPolicy(benign, adversarial, eps).Realized()));
        int pos = spec.n_states - 1;
        while (pos >= 0 && ++pick[pos] == spec.n_actions_attacker) pick[pos--] = 0;
        if (pos < 0) break;
      }
      worst = std::max(
          worst, std::abs(BestResponseAttacker(g, victim, benign, eps, kBrTol).value - enumerated));
      ++checked;
    }
  }
  return {worst <= kBrTol,
          Fmt("max |oracle - enumeration| %.3g (<= 1e-8) over %.0f game/budget pairs", worst,
              checked)};
}

Verdict BudgetGrid() {
  const fs::path dir = WorkDir(7, "run");
  RunExperiment(ParseExperimentConfig(GridConfig(dir)));
  const CsvTable t = ReadCsv((dir / "grid.csv").string());
  // seed -> defense label -> attack eps -> score, rows in emission order.
  std::map<int, std::map<std::string, std::vector<std::pair<double, double>>>> grid;
  for (size_t i = 0; i < t.rows().size(); ++i) {
    grid[static_cast<int>(t.Number(i, "game_seed"))][t.rows()[i][t.Column("defense_eps")]]
        .push_back({t.Number(i, "attack_eps"), t.Number(i, "attacker_score")});
  }
  int below = 0;
  int cells = 0;
  int monotone_rows = 0;
  int rows = 0;
  for (const auto& [seed, by_defense] : grid) {
    const auto& none = by_defense.at("none");
    for (const auto& [label, row] : by_defense) {
      ++rows;
      bool monotone = true;
      for (size_t j = 1; j < row.size(); ++j) {
        monotone &= row[j].second >= row[j - 1].second - kMonotoneTol;
      }
      if (monotone) ++monotone_rows;
      if (label == "none") continue;
      for (size_t j = 0; j < row.size(); ++j) {
        ++cells;
        if (row[j].second < none[j].second) ++below;
      }
    }
  }
  const bool games_ok = static_cast<int>(grid.size()) == kGridGames;
  return {games_ok && below == cells && monotone_rows == rows,
          Fmt("defended cells below no-defense %.0f/%.0f; monotone rows %.0f", below, cells,
              monotone_rows) +
              "/" + std::to_string(rows)};
}

// Byte comparison of every CSV under two directories.
bool SameCsvs(const fs::path& a, const fs::path& b, int& files, std::string& diff) {
  bool same = true;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path other = b / fs::relative(entry.path(), a);
    ++files;
    if (!fs::exists(other) || ReadTextFile(entry.path().string()) != ReadTextFile(other.string())) {
      same = false;
      diff = fs::relative(entry.path(), a).string();
    }
  }
  return same;
}

Verdict Determinism() {
  using ConfigFn = std::string (*)(const fs::path&);
  const std::pair<const char*, ConfigFn> runs[] = {{"rps", RpsConfig},
                                                   {"certify", CertConfig},
                                                   {"timescale", TimescaleConfig},
                                                   {"grid", GridConfig}};
  bool same = true;
  int files = 0;
  std::string diff;
  for (const auto& [name, config] : runs) {
    const fs::path first = WorkDir(8, std::string(name) + "_1");
    const fs::path second = WorkDir(8, std::string(name) + "_2");
    RunExperiment(ParseExperimentConfig(config(first)));
    RunExperiment(ParseExperimentConfig(config(second)));
    same &= SameCsvs(first, second, files, diff);
  }
  // Criteria 4 and 6 write no files; their in-memory results must repeat too.
  const Verdict g1 = GradientExactness();
  const Verdict g2 = GradientExactness();
  const Verdict b1 = BestResponseOracle();
  const Verdict b2 = BestResponseOracle();
  same &= g1.detail == g2.detail && b1.detail == b2.detail;
  return {same && files > 0, std::to_string(files) + " CSV files compared" +
                                 (diff.empty() ? "" : ", first difference in " + diff)};
}

}  // namespace
}  // namespace advtrain

int main(int argc, char** argv) {
  using advtrain::Verdict;
  const std::map<int, std::pair<const char*, Verdict (*)()>> criteria = {
      {1, {"RPS separation", advtrain::RpsSeparation}},
      {2, {"GAMin near-optimality", advtrain::RpsBestIterate}},
      {3, {"bound certification", advtrain::BoundCertification}},
      {4, {"gradient exactness", advtrain::GradientExactness}},
      {5, {"two-timescale defense", advtrain::TimescaleDefense}},
      {6, {"best-response oracle", advtrain::BestResponseOracle}},
      {7, {"budget-grid structure", advtrain::BudgetGrid}},
      {8, {"determinism", advtrain::Determinism}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (!criteria.count(c)) {
      std::fprintf(stderr, "unknown criterion: %s\n", argv[i]);
      return 2;
    }
    selected.push_back(c);
  }
  if (selected.empty()) {
    for (const auto& [c, unused] : criteria) selected.push_back(c);
  }
  bool all = true;
  for (int c : selected) {
    const auto& [name, run] = criteria.at(c);
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    all &= v.pass;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", c, name,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
