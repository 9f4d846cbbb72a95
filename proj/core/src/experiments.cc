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

#include "advtrain/experiments.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "advtrain/analysis.h"
#include "advtrain/best_response.h"
#include "advtrain/csv.h"
#include "advtrain/evaluation.h"
#include "advtrain/serialization.h"

namespace advtrain {
namespace {

using nlohmann::json;

// Stream offsets for generators derived from a game seed.
constexpr std::uint64_t kBenignStream = 2;
constexpr std::uint64_t kCertificationStream = 3;

// ---------------------------------------------------------------------------
// Config parsing.

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config " + where + ": " + what);
}

void CheckKeys(const json& obj, std::initializer_list<const char*> allowed,
               const std::string& where) {
  if (!obj.is_object()) Fail(where, "expected an object");
  for (const auto& item : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* k) { return item.key() == k; })) {
      Fail(where, "unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void Get(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) Fail(where + "." + key, "expected a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) Fail(where + "." + key, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
        Fail(where + "." + key, "expected a non-negative integer");
      }
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) Fail(where + "." + key, "expected a number");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) Fail(where + "." + key, "expected a string");
  } else {
    if (!v.is_array()) Fail(where + "." + key, "expected an array");
    for (const json& item : v) {
      if (!item.is_number()) Fail(where + "." + key, "expected numbers");
    }
  }
  out = v.get<T>();
}

InitMode ParseInit(const std::string& s, const std::string& where) {
  if (s == "uniform") return InitMode::kUniform;
  if (s == "random") return InitMode::kRandom;
  Fail(where, "expected 'uniform' or 'random', got '" + s + "'");
}

json OverrideValue(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

void ParseGameSource(const json& doc, GameSource& game) {
  if (doc.is_string()) {
    const std::string s = doc.get<std::string>();
    if (s == "builtin:rps") {
      game.kind = GameSource::Kind::kBuiltinRps;
    } else if (s == "random") {
      game.kind = GameSource::Kind::kRandom;
    } else {
      game.kind = GameSource::Kind::kFile;
      game.path = s;
    }
    return;
  }
  CheckKeys(doc,
            {"source", "path", "n_states", "n_actions", "n_actions_victim",
             "n_actions_attacker", "dirichlet_concentration", "gamma", "count"},
            "game");
  std::string source = "builtin:rps";
  Get(doc, "source", source, "game");
  if (source == "builtin:rps") {
    game.kind = GameSource::Kind::kBuiltinRps;
  } else if (source == "random") {
    game.kind = GameSource::Kind::kRandom;
  } else if (source == "file") {
    game.kind = GameSource::Kind::kFile;
  } else {
    Fail("game.source", "expected 'builtin:rps', 'random' or 'file'");
  }
  Get(doc, "path", game.path, "game");
  RandomGameSpec& spec = game.spec;
  int both = 0;
  Get(doc, "n_actions", both, "game");
  if (both > 0) spec.n_actions_victim = spec.n_actions_attacker = both;
  Get(doc, "n_states", spec.n_states, "game");
  Get(doc, "n_actions_victim", spec.n_actions_victim, "game");
  Get(doc, "n_actions_attacker", spec.n_actions_attacker, "game");
  Get(doc, "dirichlet_concentration", spec.dirichlet_concentration, "game");
  Get(doc, "gamma", spec.gamma, "game");
  Get(doc, "count", game.count, "game");
  if (game.kind == GameSource::Kind::kFile && game.path.empty()) {
    Fail("game.path", "required for file games");
  }
  if (game.count < 1) Fail("game.count", "must be >= 1");
}

void RequireUnitInterval(double x, const std::string& where) {
  if (!(x >= 0.0 && x <= 1.0)) Fail(where, "must lie in [0, 1]");
}

// ---------------------------------------------------------------------------
// Helpers shared by the runners.

std::string Fmt(double x) { return FormatDouble(x); }

// Short form for file names and check labels.
std::string Tag(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", x);
  return buffer;
}

double ToRawExpl(const MarkovGame& game, double expl) {
  return game.rescale() ? game.rescale()->ExploitabilityToRaw(expl, game.gamma())
                        : expl;
}

double ToRawValue(const MarkovGame& game, double value) {
  return game.rescale() ? game.rescale()->ValueToRaw(value, game.gamma()) : value;
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct GameInstance {
  MarkovGame game;
  std::uint64_t seed;
};

std::vector<GameInstance> ResolveGames(const ExperimentConfig& config) {
  std::vector<GameInstance> out;
  switch (config.game.kind) {
    case GameSource::Kind::kBuiltinRps:
      out.push_back({BuiltinRps(), config.seed});
      break;
    case GameSource::Kind::kFile:
      out.push_back({LoadGame(config.game.path), config.seed});
      break;
    case GameSource::Kind::kRandom:
      for (int i = 0; i < config.game.count; ++i) {
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i);
        out.push_back({GenerateRandomGame(config.game.spec, seed), seed});
      }
      break;
  }
  for (const GameInstance& g : out) {
    const std::vector<Violation> violations = ValidateGame(g.game, config.tolerances);
    if (!violations.empty()) {
      throw std::invalid_argument("invalid game: " + violations.front().kind +
                                  " " + violations.front().detail);
    }
  }
  return out;
}

const MarkovGame& SingleGame(const std::vector<GameInstance>& games,
                             const std::string& experiment) {
  if (games.size() != 1) {
    throw std::invalid_argument(experiment + " needs exactly one game");
  }
  return games.front().game;
}

Policy ResolveBenign(const ExperimentConfig& config, const MarkovGame& game,
                     std::uint64_t game_seed) {
  if (config.benign == "uniform") {
    return Policy::Uniform(game.num_states(), game.num_actions_attacker());
  }
  Policy benign = [&] {
    if (config.benign == "random") {
      std::mt19937_64 rng = SplitRng(game_seed, kBenignStream);
      return RandomPolicy(game.num_states(), game.num_actions_attacker(), rng);
    }
    return LoadPolicy(config.benign);
  }();
  RequireAttackerPolicy(game, benign);
  return benign;
}

// Trace CSV plus the selected victim policy next to it.
void WriteTrace(const std::string& path, const MarkovGame& game,
                const TrainingTrace& trace, SelectionRule rule,
                ExperimentResult& result) {
  std::vector<std::string> header = {"iter", "J", "grad_norm_victim", "expl",
                                     "eta_v", "eta_a"};
  const bool raw = game.rescale().has_value();
  if (raw) {
    header.push_back("J_raw");
    header.push_back("expl_raw");
  }
  CsvTable table(header);
  for (size_t t = 0; t < trace.records.size(); ++t) {
    const IterationRecord& r = trace.records[t];
    std::vector<std::string> row = {std::to_string(t), Fmt(r.value),
                                    Fmt(r.victim_grad_norm), Fmt(r.exploitability),
                                    Fmt(r.eta_victim), Fmt(r.eta_attacker)};
    if (raw) {
      row.push_back(Fmt(ToRawValue(game, r.value)));
      row.push_back(Fmt(ToRawExpl(game, r.exploitability)));
    }
    table.AddRow(std::move(row));
  }
  table.Write(path);
  result.files.push_back(path);
  std::string sidecar = path;
  if (sidecar.size() > 4 && sidecar.compare(sidecar.size() - 4, 4, ".csv") == 0) {
    sidecar.resize(sidecar.size() - 4);
  }
  sidecar += ".policy.json";
  SavePolicy(sidecar, trace.Selected(rule));
  result.files.push_back(sidecar);
}

struct WindowStats {
  double mean = 0.0;
  double max = -std::numeric_limits<double>::infinity();
};

WindowStats TrailingWindow(const MarkovGame& game, const TrainingTrace& trace,
                           int window) {
  const int n = static_cast<int>(trace.records.size());
  const int start = std::max(0, n - window);
  WindowStats stats;
  for (int t = start; t < n; ++t) {
    const double e = ToRawExpl(game, trace.records[t].exploitability);
    stats.mean += e;
    stats.max = std::max(stats.max, e);
  }
  stats.mean /= static_cast<double>(n - start);
  return stats;
}

Check MakeCheck(std::string name, bool pass, std::string detail,
                bool informational = false) {
  return {std::move(name), pass, std::move(detail), informational};
}

std::string Ratio(int k, int n) {
  return std::to_string(k) + "/" + std::to_string(n);
}

// ---------------------------------------------------------------------------
// Certification instances.

struct CertInstance {
  MarkovGame game;
  Policy victim;
  Policy benign;
  Policy adversarial;
  std::uint64_t seed;
};

CertInstance DrawCertInstance(std::uint64_t seed, double gamma, int max_states,
                              int max_actions) {
  std::mt19937_64 rng = SplitRng(seed, kCertificationStream);
  std::uniform_int_distribution<int> states(1, max_states);
  std::uniform_int_distribution<int> actions(1, max_actions);
  RandomGameSpec spec;
  spec.n_states = states(rng);
  spec.n_actions_victim = actions(rng);
  spec.n_actions_attacker = actions(rng);
  spec.gamma = gamma;
  MarkovGame game = GenerateRandomGame(spec, seed);
  Policy victim = RandomPolicy(spec.n_states, spec.n_actions_victim, rng);
  Policy benign = RandomPolicy(spec.n_states, spec.n_actions_attacker, rng);
  Policy adversarial = RandomPolicy(spec.n_states, spec.n_actions_attacker, rng);
  return {std::move(game), std::move(victim), std::move(benign),
          std::move(adversarial), seed};
}

std::uint64_t InstanceSeed(std::uint64_t root, std::uint64_t family,
                           std::uint64_t index) {
  std::mt19937_64 rng = SplitRng(root, (family << 32) | index);
  return rng();
}

struct BoundTally {
  std::string family;
  int total = 0;
  int passed = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
};

void Tally(std::vector<BoundTally>& tallies, const std::string& family,
           const BoundReport& r) {
  auto it = std::find_if(tallies.begin(), tallies.end(),
                         [&](const BoundTally& t) { return t.family == family; });
  if (it == tallies.end()) {
    tallies.push_back({family});
    it = tallies.end() - 1;
  }
  ++it->total;
  it->passed += r.pass ? 1 : 0;
  it->worst_slack = std::min(it->worst_slack, r.slack);
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig ParseExperimentConfig(
    std::string_view text,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) Fail("root", "expected an object");
  for (const auto& [key, value] : overrides) {
    if (key.empty()) Fail("override", "empty key");
    std::string pointer = "/" + key;
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    try {
      doc[json::json_pointer(pointer)] = OverrideValue(value);
    } catch (const json::exception& e) {
      Fail(key, std::string("cannot apply override: ") + e.what());
    }
  }

  CheckKeys(doc,
            {"experiment", "seed", "output_dir", "game", "benign", "eps",
             "defense_eps", "attack_eps", "schedule", "kappas", "init",
             "selection", "tolerances", "victim", "checks", "certification"},
            "root");
  ExperimentConfig config;
  Get(doc, "experiment", config.experiment, "root");
  Get(doc, "seed", config.seed, "root");
  Get(doc, "output_dir", config.output_dir, "root");
  if (doc.contains("game")) ParseGameSource(doc.at("game"), config.game);
  Get(doc, "benign", config.benign, "root");
  Get(doc, "eps", config.eps, "root");
  Get(doc, "defense_eps", config.defense_eps, "root");
  Get(doc, "attack_eps", config.attack_eps, "root");
  Get(doc, "kappas", config.kappas, "root");
  Get(doc, "victim", config.victim_path, "root");
  if (doc.contains("schedule")) {
    const json& s = doc.at("schedule");
    CheckKeys(s, {"eta_victim", "kappa", "iterations"}, "schedule");
    Get(s, "eta_victim", config.eta_victim, "schedule");
    Get(s, "kappa", config.kappa, "schedule");
    Get(s, "iterations", config.iterations, "schedule");
  }
  if (doc.contains("init")) {
    const json& s = doc.at("init");
    CheckKeys(s, {"victim", "attacker"}, "init");
    std::string victim = "uniform";
    std::string attacker = "random";
    Get(s, "victim", victim, "init");
    Get(s, "attacker", attacker, "init");
    config.training.victim_init = ParseInit(victim, "init.victim");
    config.training.attacker_init = ParseInit(attacker, "init.attacker");
  }
  if (doc.contains("selection")) {
    std::string rule;
    Get(doc, "selection", rule, "root");
    try {
      config.selection = ParseSelectionRule(rule);
    } catch (const std::invalid_argument& e) {
      Fail("selection", e.what());
    }
  }
  if (doc.contains("tolerances")) {
    const json& s = doc.at("tolerances");
    CheckKeys(s, {"best_response", "stochastic", "solve", "tie"}, "tolerances");
    Get(s, "best_response", config.training.best_response_tol, "tolerances");
    Get(s, "stochastic", config.tolerances.stochastic, "tolerances");
    Get(s, "solve", config.tolerances.solve, "tolerances");
    Get(s, "tie", config.tolerances.tie, "tolerances");
  }
  if (doc.contains("checks")) {
    const json& c = doc.at("checks");
    CheckKeys(c, {"rps", "timescale"}, "checks");
    if (c.contains("rps")) {
      const json& r = c.at("rps");
      RpsChecks& k = config.rps_checks;
      CheckKeys(r, {"window", "min_oracle_max", "min_oracle_best",
                    "baseline_min_mean", "two_timescale_gap"}, "checks.rps");
      Get(r, "window", k.window, "checks.rps");
      Get(r, "min_oracle_max", k.min_oracle_max, "checks.rps");
      Get(r, "min_oracle_best", k.min_oracle_best, "checks.rps");
      Get(r, "baseline_min_mean", k.baseline_min_mean, "checks.rps");
      Get(r, "two_timescale_gap", k.two_timescale_gap, "checks.rps");
      if (k.window < 1) Fail("checks.rps.window", "must be >= 1");
    }
    if (c.contains("timescale")) {
      const json& r = c.at("timescale");
      TimescaleChecks& k = config.timescale_checks;
      CheckKeys(r, {"compare_kappa", "reference_kappa", "min_win_fraction",
                    "gap", "min_close_fraction"}, "checks.timescale");
      Get(r, "compare_kappa", k.compare_kappa, "checks.timescale");
      Get(r, "reference_kappa", k.reference_kappa, "checks.timescale");
      Get(r, "min_win_fraction", k.min_win_fraction, "checks.timescale");
      Get(r, "gap", k.gap, "checks.timescale");
      Get(r, "min_close_fraction", k.min_close_fraction, "checks.timescale");
    }
  }
  if (doc.contains("certification")) {
    const json& c = doc.at("certification");
    CertificationSettings& k = config.certification;
    CheckKeys(c, {"instances", "max_states", "max_actions", "gammas", "eps",
                  "probe_pairs", "domination_instances",
                  "domination_max_states", "domination_max_actions"},
              "certification");
    Get(c, "instances", k.instances, "certification");
    Get(c, "max_states", k.max_states, "certification");
    Get(c, "max_actions", k.max_actions, "certification");
    Get(c, "gammas", k.gammas, "certification");
    Get(c, "eps", k.eps, "certification");
    Get(c, "probe_pairs", k.probe_pairs, "certification");
    Get(c, "domination_instances", k.domination_instances, "certification");
    Get(c, "domination_max_states", k.domination_max_states, "certification");
    Get(c, "domination_max_actions", k.domination_max_actions, "certification");
    if (k.instances < 0 || k.probe_pairs < 0 || k.domination_instances < 0) {
      Fail("certification", "counts must be non-negative");
    }
    if (k.max_states < 1 || k.max_actions < 1 || k.domination_max_states < 1 ||
        k.domination_max_actions < 1) {
      Fail("certification", "size caps must be >= 1");
    }
    if (k.gammas.empty()) Fail("certification.gammas", "must not be empty");
    for (double g : k.gammas) {
      if (!(g >= 0.0 && g <= kDefaultTolerances.max_discount)) {
        Fail("certification.gammas", "each gamma must lie in [0, 0.999]");
      }
    }
    for (double e : k.eps) RequireUnitInterval(e, "certification.eps");
  }

  RequireUnitInterval(config.eps, "eps");
  for (double e : config.defense_eps) RequireUnitInterval(e, "defense_eps");
  for (double e : config.attack_eps) RequireUnitInterval(e, "attack_eps");
  if (config.iterations < 1) Fail("schedule.iterations", "must be >= 1");
  if (!(config.eta_victim > 0.0) || !std::isfinite(config.eta_victim)) {
    Fail("schedule.eta_victim", "must be positive");
  }
  if (!(config.kappa >= 1.0) || !std::isfinite(config.kappa)) {
    Fail("schedule.kappa", "must be >= 1");
  }
  for (double k : config.kappas) {
    if (!(k >= 1.0) || !std::isfinite(k)) Fail("kappas", "each kappa must be >= 1");
  }
  if (!(config.training.best_response_tol > 0.0)) {
    Fail("tolerances.best_response", "must be positive");
  }
  return config;
}

bool ExperimentResult::AllPassed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) {
    return c.informational || c.pass;
  });
}

MarkovGame ResolveGame(const std::string& source) {
  if (source == "builtin:rps") return BuiltinRps();
  return LoadGame(source);
}

ExperimentResult RunRpsBenchmark(const ExperimentConfig& config) {
  const std::vector<GameInstance> games = ResolveGames(config);
  const MarkovGame& game = SingleGame(games, "rps-benchmark");
  const Policy benign = ResolveBenign(config, game, config.seed);
  EnsureDir(config.output_dir);
  ExperimentResult result;
  const RpsChecks& k = config.rps_checks;

  std::vector<std::string> header = {
      "method", "kappa", "eta_v", "eta_a", "final_expl", "avg_expl",
      "best_expl", "window_mean_expl", "window_max_expl", "selected_iter",
      "selection"};
  const bool raw = game.rescale().has_value();
  if (raw) {
    for (const char* c : {"final_expl_raw", "avg_expl_raw", "best_expl_raw",
                          "window_mean_expl_raw", "window_max_expl_raw"}) {
      header.push_back(c);
    }
  }
  CsvTable summary(header);
  auto summarize = [&](const TrainingTrace& trace, double kappa) {
    const IterationRecord& last = trace.records.back();
    const double final_e = last.exploitability;
    const double avg = trace.weighted_average_exploitability;
    const double best = trace.best_exploitability();
    // The window statistics are computed in raw units; convert back for the
    // scaled columns.
    const WindowStats w = TrailingWindow(game, trace, k.window);
    auto from_raw = [&](double x) {
      if (!raw) return x;
      const RewardRescale& r = *game.rescale();
      return (x + r.offset / (1.0 - game.gamma())) / r.scale;
    };
    std::vector<std::string> row = {
        trace.method, Tag(kappa), Fmt(trace.records.front().eta_victim),
        Fmt(trace.records.front().eta_attacker), Fmt(final_e), Fmt(avg),
        Fmt(best), Fmt(from_raw(w.mean)), Fmt(from_raw(w.max)),
        std::to_string(config.selection == SelectionRule::kBest
                           ? trace.best_iteration
                       : config.selection == SelectionRule::kLast
                           ? static_cast<int>(trace.records.size()) - 1
                           : trace.sampled_iteration),
        std::string(SelectionRuleName(config.selection))};
    if (raw) {
      for (double x : {ToRawExpl(game, final_e), ToRawExpl(game, avg),
                       ToRawExpl(game, best), w.mean, w.max}) {
        row.push_back(Fmt(x));
      }
    }
    summary.AddRow(std::move(row));
    return w;
  };

  const LearningSchedule schedule =
      LearningSchedule::Constant(config.eta_victim, 1.0, config.iterations);
  double min_oracle_avg = 0.0;
  for (Method m : {Method::kSgda, Method::kAgda, Method::kSibr, Method::kAibr,
                   Method::kGaMin}) {
    const TrainingTrace trace = RunBaseline(game, benign, config.eps, m, schedule,
                                            config.seed, config.training);
    WriteTrace(JoinPath(config.output_dir, "trace_" + Lower(trace.method) + ".csv"),
               game, trace, config.selection, result);
    const WindowStats w = summarize(trace, 1.0);
    const std::string window = "last " + std::to_string(k.window) + " iterates";
    if (m == Method::kGaMin) {
      min_oracle_avg = ToRawExpl(game, trace.weighted_average_exploitability);
      result.checks.push_back(MakeCheck(
          "GAMin raw exploitability <= " + Tag(k.min_oracle_max) + " over " + window,
          w.max <= k.min_oracle_max, "max " + Fmt(w.max)));
      const double best = ToRawExpl(game, trace.best_exploitability());
      result.checks.push_back(MakeCheck(
          "GAMin best-iterate raw exploitability <= " + Tag(k.min_oracle_best),
          best <= k.min_oracle_best,
          "best " + Fmt(best) + " at iteration " +
              std::to_string(trace.best_iteration)));
    } else {
      result.checks.push_back(MakeCheck(
          trace.method + " mean raw exploitability >= " +
              Tag(k.baseline_min_mean) + " over " + window,
          w.mean >= k.baseline_min_mean, "mean " + Fmt(w.mean)));
    }
  }
  for (double kappa : config.kappas) {
    if (kappa == 1.0) continue;  // identical to the SGDA row
    const LearningSchedule tt =
        LearningSchedule::Constant(config.eta_victim / kappa, kappa,
                                   config.iterations);
    const TrainingTrace trace = TrainTwoTimescale(game, benign, config.eps, tt,
                                                  config.seed, config.training);
    WriteTrace(JoinPath(config.output_dir,
                        "trace_two-timescale_kappa" + Tag(kappa) + ".csv"),
               game, trace, config.selection, result);
    summarize(trace, kappa);
    const double avg = ToRawExpl(game, trace.weighted_average_exploitability);
    result.checks.push_back(MakeCheck(
        "two-timescale kappa=" + Tag(kappa) + " average within " +
            Tag(k.two_timescale_gap) + " of GAMin",
        std::abs(avg - min_oracle_avg) <= k.two_timescale_gap,
        "avg " + Fmt(avg) + " vs " + Fmt(min_oracle_avg)));
  }
  const std::string path = JoinPath(config.output_dir, "summary.csv");
  summary.Write(path);
  result.files.push_back(path);
  return result;
}

ExperimentResult RunTimescaleStudy(const ExperimentConfig& config) {
  const std::vector<GameInstance> games = ResolveGames(config);
  const TimescaleChecks& k = config.timescale_checks;
  auto has = [&](double kappa) {
    return std::find(config.kappas.begin(), config.kappas.end(), kappa) !=
           config.kappas.end();
  };
  if (!has(k.reference_kappa) || !has(k.compare_kappa)) {
    throw std::invalid_argument(
        "timescale-study: kappas must contain the compared and reference ratios");
  }
  EnsureDir(config.output_dir);
  ExperimentResult result;
  CsvTable summary({"game_seed", "kappa", "avg_expl", "best_expl", "final_expl",
                    "final_grad_norm", "reference_avg_expl",
                    "min_oracle_avg_expl", "below_reference",
                    "gap_to_min_oracle"});
  int wins = 0;
  int close = 0;
  for (const GameInstance& g : games) {
    const Policy benign = ResolveBenign(config, g.game, g.seed);
    const std::string dir = JoinPath(config.output_dir, "seed" + std::to_string(g.seed));
    EnsureDir(dir);
    const TrainingTrace oracle = TrainMinOracle(
        g.game, benign, config.eps,
        LearningSchedule::Constant(config.eta_victim, 1.0, config.iterations),
        g.seed, config.training);
    WriteTrace(JoinPath(dir, "trace_min_oracle.csv"), g.game, oracle,
               config.selection, result);
    const double oracle_avg = ToRawExpl(g.game, oracle.weighted_average_exploitability);
    std::vector<std::pair<double, TrainingTrace>> runs;
    for (double kappa : config.kappas) {
      TrainingTrace trace = TrainTwoTimescale(
          g.game, benign, config.eps,
          LearningSchedule::Constant(config.eta_victim, kappa, config.iterations),
          g.seed, config.training);
      WriteTrace(JoinPath(dir, "trace_kappa" + Tag(kappa) + ".csv"), g.game,
                 trace, config.selection, result);
      runs.emplace_back(kappa, std::move(trace));
    }
    double reference = 0.0;
    for (const auto& [kappa, trace] : runs) {
      if (kappa == k.reference_kappa) {
        reference = ToRawExpl(g.game, trace.weighted_average_exploitability);
      }
    }
    for (const auto& [kappa, trace] : runs) {
      const double avg = ToRawExpl(g.game, trace.weighted_average_exploitability);
      const bool below = avg < reference;
      const double gap = avg - oracle_avg;
      if (kappa == k.compare_kappa) {
        wins += below ? 1 : 0;
        close += std::abs(gap) <= k.gap ? 1 : 0;
      }
      summary.AddRow({std::to_string(g.seed), Tag(kappa), Fmt(avg),
                      Fmt(ToRawExpl(g.game, trace.best_exploitability())),
                      Fmt(ToRawExpl(g.game, trace.records.back().exploitability)),
                      Fmt(trace.records.back().victim_grad_norm), Fmt(reference),
                      Fmt(oracle_avg), below ? "1" : "0", Fmt(gap)});
    }
  }
  const int n = static_cast<int>(games.size());
  const std::string compare = "kappa=" + Tag(k.compare_kappa);
  result.checks.push_back(MakeCheck(
      compare + " average exploitability strictly below kappa=" +
          Tag(k.reference_kappa),
      wins >= static_cast<int>(std::ceil(k.min_win_fraction * n - 1e-9)),
      Ratio(wins, n) + " games"));
  result.checks.push_back(MakeCheck(
      compare + " average within " + Tag(k.gap) + " of the min-oracle run",
      close >= static_cast<int>(std::ceil(k.min_close_fraction * n - 1e-9)),
      Ratio(close, n) + " games"));
  const std::string path = JoinPath(config.output_dir, "summary.csv");
  summary.Write(path);
  result.files.push_back(path);
  return result;
}

ExperimentResult RunBudgetGrid(const ExperimentConfig& config) {
  const std::vector<GameInstance> games = ResolveGames(config);
  if (config.attack_eps.empty() || config.defense_eps.empty()) {
    throw std::invalid_argument("budget-grid: both budget grids must be non-empty");
  }
  EnsureDir(config.output_dir);
  ExperimentResult result;
  const bool raw = games.front().game.rescale().has_value();
  std::vector<std::string> header = {"game_seed", "defense_eps", "attack_eps",
                                     "attacker_score"};
  if (raw) header.push_back("attacker_score_raw");
  CsvTable grid(header);
  constexpr double kMonotoneTol = 1e-9;
  const LearningSchedule schedule =
      LearningSchedule::Constant(config.eta_victim, config.kappa, config.iterations);
  for (const GameInstance& g : games) {
    const Policy benign = ResolveBenign(config, g.game, g.seed);
    std::vector<std::pair<std::string, Policy>> rows;
    rows.emplace_back("none", BestResponseVictim(g.game, benign,
                                                 config.training.best_response_tol)
                                  .policy);
    for (double d : config.defense_eps) {
      const TrainingTrace trace = TrainTwoTimescale(g.game, benign, d, schedule,
                                                    g.seed, config.training);
      rows.emplace_back(Tag(d), trace.Selected(config.selection));
    }
    std::vector<std::vector<double>> scores;
    for (const auto& [label, victim] : rows) {
      const std::string policy_path = JoinPath(
          config.output_dir,
          "victim_seed" + std::to_string(g.seed) + "_defense_" + label + ".json");
      SavePolicy(policy_path, victim);
      result.files.push_back(policy_path);
      std::vector<double>& row = scores.emplace_back();
      for (double a : config.attack_eps) {
        const double score = Exploitability(g.game, victim, benign, a,
                                            config.training.best_response_tol);
        row.push_back(score);
        std::vector<std::string> cells = {std::to_string(g.seed), label, Tag(a),
                                          Fmt(score)};
        if (raw) cells.push_back(Fmt(ToRawExpl(g.game, score)));
        grid.AddRow(std::move(cells));
      }
    }

    const std::string game_label = "game " + std::to_string(g.seed);
    int below = 0;
    int cells = 0;
    std::string misses;
    for (size_t r = 1; r < rows.size(); ++r) {
      for (size_t c = 0; c < config.attack_eps.size(); ++c) {
        ++cells;
        if (scores[r][c] < scores[0][c]) {
          ++below;
        } else if (misses.size() < 200) {
          misses += " (defense " + rows[r].first + ", attack " +
                    Tag(config.attack_eps[c]) + ")";
        }
      }
    }
    result.checks.push_back(MakeCheck(
        game_label + ": every defended row below the no-defense row",
        below == cells, Ratio(below, cells) + " cells below" + misses));

    bool monotone = true;
    for (const std::vector<double>& row : scores) {
      for (size_t c = 0; c + 1 < row.size(); ++c) {
        if (config.attack_eps[c] <= config.attack_eps[c + 1] &&
            row[c + 1] < row[c] - kMonotoneTol) {
          monotone = false;
        }
      }
    }
    result.checks.push_back(MakeCheck(
        game_label + ": rows non-decreasing in attack eps", monotone, ""));

    for (size_t c = 0; c < config.attack_eps.size(); ++c) {
      if (config.attack_eps[c] != 0.0) continue;
      double worst = 0.0;
      for (size_t r = 0; r < rows.size(); ++r) {
        worst = std::max(worst, std::abs(scores[r][c] +
                                         Value(g.game, rows[r].second, benign)));
      }
      result.checks.push_back(MakeCheck(
          game_label + ": attack eps 0 column equals -value against benign",
          worst <= kMonotoneTol, "max deviation " + Fmt(worst)));
    }

    // Qualitative diagonal structure, reported only.
    int diagonal = 0;
    int diagonal_total = 0;
    for (size_t c = 0; c < config.attack_eps.size(); ++c) {
      for (size_t r = 1; r < rows.size(); ++r) {
        if (config.defense_eps[r - 1] != config.attack_eps[c]) continue;
        ++diagonal_total;
        double column_min = std::numeric_limits<double>::infinity();
        for (size_t q = 1; q < rows.size(); ++q) {
          column_min = std::min(column_min, scores[q][c]);
        }
        diagonal += scores[r][c] <= column_min + 1e-6 ? 1 : 0;
      }
    }
    result.checks.push_back(MakeCheck(
        game_label + ": matched defense is the column minimum",
        diagonal == diagonal_total, Ratio(diagonal, diagonal_total) + " columns",
        /*informational=*/true));
  }
  const std::string path = JoinPath(config.output_dir, "grid.csv");
  grid.Write(path);
  result.files.push_back(path);
  return result;
}

ExperimentResult RunBoundCertification(const ExperimentConfig& config) {
  const CertificationSettings& k = config.certification;
  EnsureDir(config.output_dir);
  ExperimentResult result;
  CsvTable table({"bound", "instance_seed", "eps", "lhs", "rhs", "slack", "pass"});
  std::vector<BoundTally> tallies;
  auto emit = [&](const std::string& family, BoundReport r, std::uint64_t seed,
                  const std::string& label) {
    r.instance_seed = seed;
    table.AddRow({label, std::to_string(seed), Fmt(r.eps), Fmt(r.lhs),
                  Fmt(r.rhs), Fmt(r.slack), r.pass ? "1" : "0"});
    Tally(tallies, family, r);
  };

  const int classes = static_cast<int>(k.gammas.size());
  for (int i = 0; i < k.instances; ++i) {
    const std::uint64_t seed = InstanceSeed(config.seed, 1, static_cast<std::uint64_t>(i));
    const CertInstance inst =
        DrawCertInstance(seed, k.gammas[static_cast<size_t>(i % classes)],
                         k.max_states, k.max_actions);
    for (double eps : k.eps) {
      const CoupledPolicy coupled(inst.benign, inst.adversarial, eps);
      emit("value", VerifyValueBound(inst.game, inst.victim, coupled), seed, "value");
      emit("visitation", VerifyVisitationBound(inst.game, inst.victim, coupled),
           seed, "visitation");
      const double tv = TvMax(coupled.Realized(), inst.benign);
      emit("tv-max", MakeBoundReport("tv-max", tv, eps, eps), seed, "tv-max");
      for (Divergence f : {Divergence::kTv, Divergence::kKl, Divergence::kHellinger}) {
        const std::string family =
            "marginalized-dynamics-" + std::string(DivergenceName(f));
        for (const BoundReport& r :
             VerifyMarginalizedDynamicsBound(inst.game, coupled, f)) {
          std::string label = family + "[" + r.instance.substr(r.instance.find(' ') + 1) + "]";
          std::replace(label.begin(), label.end(), ' ', ';');
          emit(family, r, seed, label);
        }
      }
    }
  }

  for (int c = 0; c < classes; ++c) {
    for (int j = 0; j < k.probe_pairs; ++j) {
      const std::uint64_t seed = InstanceSeed(
          config.seed, 2, (static_cast<std::uint64_t>(c) << 16) | static_cast<std::uint64_t>(j));
      const CertInstance inst = DrawCertInstance(
          seed, k.gammas[static_cast<size_t>(c)], k.max_states, k.max_actions);
      std::mt19937_64 rng = SplitRng(seed, kCertificationStream + 1);
      const double eps = k.eps.empty()
                             ? 1.0
                             : k.eps[static_cast<size_t>(j) % k.eps.size()];
      const Policy other_victim =
          RandomPolicy(inst.game.num_states(), inst.game.num_actions_victim(), rng);
      const Policy other_adv =
          RandomPolicy(inst.game.num_states(), inst.game.num_actions_attacker(), rng);
      const CoupledPolicy here(inst.benign, inst.adversarial, eps);
      const CoupledPolicy there(inst.benign, other_adv, eps);
      const auto lip = ProbeLipschitz(inst.game, inst.victim, here);
      emit("lipschitz", lip.first, seed, lip.first.bound);
      emit("lipschitz", lip.second, seed, lip.second.bound);
      const auto smooth = ProbeSmoothness(inst.game, inst.victim, here,
                                          other_victim, there);
      emit("smoothness", smooth.first, seed, smooth.first.bound);
      emit("smoothness", smooth.second, seed, smooth.second.bound);
    }
  }

  for (int i = 0; i < k.domination_instances; ++i) {
    const std::uint64_t seed = InstanceSeed(config.seed, 3, static_cast<std::uint64_t>(i));
    const CertInstance inst = DrawCertInstance(
        seed, k.gammas[static_cast<size_t>(i % classes)], k.domination_max_states,
        k.domination_max_actions);
    const double eps =
        k.eps.empty() ? 1.0 : k.eps[static_cast<size_t>(i) % k.eps.size()];
    const MismatchEstimate c =
        EstimateMismatch(inst.game, inst.benign, eps,
                         MismatchMode::kEnumerateDeterministic);
    const auto gd = ProbeGradientDomination(
        inst.game, inst.victim, CoupledPolicy(inst.benign, inst.adversarial, eps),
        c.estimate);
    emit("gradient-domination", gd.first, seed, gd.first.bound);
    emit("gradient-domination", gd.second, seed, gd.second.bound);
  }

  const std::string path = JoinPath(config.output_dir, "certification.csv");
  table.Write(path);
  result.files.push_back(path);
  for (const BoundTally& t : tallies) {
    std::string detail = Ratio(t.passed, t.total) + " pass, min slack " + Fmt(t.worst_slack);
    if (t.family == "gradient-domination" && t.passed < t.total) {
      detail += " (failures indicate an underestimated mismatch coefficient)";
    }
    result.checks.push_back(MakeCheck(t.family, t.passed == t.total, detail));
  }
  return result;
}

ExperimentResult RunAttack(const ExperimentConfig& config) {
  const std::vector<GameInstance> games = ResolveGames(config);
  const MarkovGame& game = SingleGame(games, "attack");
  if (config.victim_path.empty()) {
    throw std::invalid_argument("attack: config key 'victim' (policy file) is required");
  }
  const Policy victim = LoadPolicy(config.victim_path);
  RequireVictimPolicy(game, victim);
  const Policy benign = ResolveBenign(config, game, config.seed);
  EnsureDir(config.output_dir);
  ExperimentResult result;

  const BestResponse attack = BestResponseAttacker(
      game, victim, benign, config.eps, config.training.best_response_tol);
  const CoupledPolicy coupled(benign, attack.policy, config.eps);
  const Policy realized = coupled.Realized();
  const double benign_value = Value(game, victim, benign);
  const double tv = TvMax(realized, benign);
  const double shift = (StateVisitation(game, victim, benign).dist -
                        StateVisitation(game, victim, realized).dist)
                           .lpNorm<1>();

  std::vector<std::string> header = {"eps", "benign_value", "attacked_value",
                                     "tv_max", "visitation_l1"};
  const bool raw = game.rescale().has_value();
  if (raw) {
    header.push_back("benign_value_raw");
    header.push_back("attacked_value_raw");
  }
  CsvTable table(header);
  std::vector<std::string> row = {Fmt(config.eps), Fmt(benign_value),
                                  Fmt(attack.value), Fmt(tv), Fmt(shift)};
  if (raw) {
    row.push_back(Fmt(ToRawValue(game, benign_value)));
    row.push_back(Fmt(ToRawValue(game, attack.value)));
  }
  table.AddRow(std::move(row));
  const std::string path = JoinPath(config.output_dir, "attack.csv");
  table.Write(path);
  result.files.push_back(path);
  const std::string policy_path = JoinPath(config.output_dir, "adversarial_policy.json");
  SavePolicy(policy_path, attack.policy);
  result.files.push_back(policy_path);

  const BoundReport value_bound = VerifyValueBound(game, victim, coupled);
  const BoundReport visit_bound = VerifyVisitationBound(game, victim, coupled);
  result.checks.push_back(MakeCheck("tv_max within budget",
                                    tv <= config.eps + kBoundSlackTol,
                                    "tv_max " + Fmt(tv)));
  result.checks.push_back(MakeCheck("value shift within bound", value_bound.pass,
                                    "slack " + Fmt(value_bound.slack)));
  result.checks.push_back(MakeCheck("visitation shift within bound",
                                    visit_bound.pass,
                                    "slack " + Fmt(visit_bound.slack)));
  result.checks.push_back(MakeCheck("attack does not raise the victim value",
                                    attack.value <= benign_value + config.training.best_response_tol,
                                    "attacked " + Fmt(attack.value) + ", benign " +
                                        Fmt(benign_value)));
  return result;
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  if (config.experiment == "rps-benchmark") return RunRpsBenchmark(config);
  if (config.experiment == "timescale-study") return RunTimescaleStudy(config);
  if (config.experiment == "budget-grid") return RunBudgetGrid(config);
  if (config.experiment == "certify-bounds") return RunBoundCertification(config);
  if (config.experiment == "attack") return RunAttack(config);
  throw std::invalid_argument("unknown experiment: '" + config.experiment + "'");
}

}  // namespace advtrain
