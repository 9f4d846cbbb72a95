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

// Command-line driver for the advtrain experiments.
//
//   advtrain validate <game>
//   advtrain rps-benchmark <config> [--key.path=value ...]
//   advtrain timescale-study <config> [...]
//   advtrain budget-grid <config> [...]
//   advtrain certify-bounds <config> [...]
//   advtrain attack <config> [...]
//
// Flags after the config override its keys: --schedule.iterations=500 sets
// {"schedule": {"iterations": 500}}. ADVTRAIN_SEED overrides the root seed
// from the file; an explicit --seed flag wins over both. The exit status is 0
// iff every check passed, 1 if a check failed and 2 on usage or input errors.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "advtrain/experiments.h"
#include "advtrain/game.h"
#include "advtrain/serialization.h"

namespace {

constexpr int kChecksFailed = 1;
constexpr int kUsageError = 2;

using Overrides = std::vector<std::pair<std::string, std::string>>;

Overrides CollectOverrides(const std::vector<std::string>& extras) {
  Overrides out;
  if (const char* env = std::getenv("ADVTRAIN_SEED"); env != nullptr && *env) {
    out.emplace_back("seed", env);
  }
  for (size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) {
      throw std::invalid_argument("unexpected argument: " + arg);
    }
    const std::string body = arg.substr(2);
    const size_t eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      out.emplace_back(body, extras[++i]);
    } else {
      throw std::invalid_argument("missing value for --" + body);
    }
  }
  return out;
}

int Report(const advtrain::ExperimentResult& result) {
  for (const std::string& f : result.files) std::printf("wrote %s\n", f.c_str());
  for (const advtrain::Check& c : result.checks) {
    const char* tag = c.informational ? "INFO" : (c.pass ? "PASS" : "FAIL");
    std::printf("%s %s%s%s\n", tag, c.name.c_str(), c.detail.empty() ? "" : ": ",
                c.detail.c_str());
  }
  return result.AllPassed() ? 0 : kChecksFailed;
}

int Validate(const std::string& source) {
  const advtrain::MarkovGame game = advtrain::ResolveGame(source);
  const std::vector<advtrain::Violation> violations = advtrain::ValidateGame(game);
  for (const advtrain::Violation& v : violations) {
    std::printf("violation %s: %s\n", v.kind.c_str(), v.detail.c_str());
  }
  if (violations.empty()) {
    std::printf("valid: %d states, %d victim actions, %d attacker actions, gamma %g\n",
                game.num_states(), game.num_actions_victim(),
                game.num_actions_attacker(), game.gamma());
    return 0;
  }
  return kChecksFailed;
}

int RunConfig(const std::string& experiment, const std::string& path,
              const std::vector<std::string>& extras) {
  Overrides overrides = CollectOverrides(extras);
  overrides.insert(overrides.begin(), {"experiment", "\"" + experiment + "\""});
  const advtrain::ExperimentConfig config =
      advtrain::ParseExperimentConfig(advtrain::ReadTextFile(path), overrides);
  return Report(advtrain::RunExperiment(config));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial training and exploitability on tabular Markov games",
               "advtrain"};
  app.require_subcommand(1);

  std::string game_source;
  CLI::App* validate = app.add_subcommand("validate", "Check a game file for invariant violations");
  validate->add_option("game", game_source, "Game file or builtin:rps")->required();

  struct Entry {
    const char* name;
    const char* help;
    std::string config;
    CLI::App* cmd = nullptr;
  };
  std::vector<Entry> entries = {
      {"rps-benchmark", "Rock-paper-scissors comparison of all training dynamics", {}},
      {"timescale-study", "Two-timescale ratios against the min oracle on random games", {}},
      {"budget-grid", "Defense budget versus attack budget exploitability grid", {}},
      {"certify-bounds", "Numerical certification of the perturbation bounds", {}},
      {"attack", "Best budget-constrained attack on a fixed victim policy", {}},
  };
  for (Entry& e : entries) {
    e.cmd = app.add_subcommand(e.name, e.help);
    e.cmd->add_option("config", e.config, "JSON experiment config")->required();
    e.cmd->allow_extras();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (validate->parsed()) return Validate(game_source);
    for (const Entry& e : entries) {
      if (e.cmd->parsed()) return RunConfig(e.name, e.config, e.cmd->remaining());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  }
  return kUsageError;
}
