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

#include "advtrain/serialization.h"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace advtrain {
namespace {

using nlohmann::json;

json Parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

const json& Field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw std::invalid_argument(std::string("missing key: ") + key);
  }
  return doc.at(key);
}

int Count(const json& doc, const char* key) {
  const json& v = Field(doc, key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw std::invalid_argument(std::string(key) + " must be a positive integer");
  }
  return v.get<int>();
}

double Number(const json& v, const char* what) {
  if (!v.is_number()) {
    throw std::invalid_argument(std::string(what) + ": expected a number");
  }
  return v.get<double>();
}

// Flattens a nested array whose shape must equal `dims`.
void Flatten(const json& v, const std::vector<int>& dims, size_t depth,
             const char* what, std::vector<double>& out) {
  if (depth == dims.size()) {
    out.push_back(Number(v, what));
    return;
  }
  if (!v.is_array() || static_cast<int>(v.size()) != dims[depth]) {
    std::ostringstream msg;
    msg << what << ": expected " << dims[depth] << " entries at depth " << depth;
    throw std::invalid_argument(msg.str());
  }
  for (const json& item : v) Flatten(item, dims, depth + 1, what, out);
}

json Nest(const std::vector<double>& flat, const std::vector<int>& dims) {
  // Builds the nested array from the innermost dimension outwards.
  std::vector<json> level(flat.begin(), flat.end());
  for (size_t d = dims.size(); d-- > 1;) {
    std::vector<json> next;
    const size_t width = static_cast<size_t>(dims[d]);
    for (size_t i = 0; i < level.size(); i += width) {
      next.emplace_back(json::array());
      for (size_t j = 0; j < width; ++j) next.back().push_back(std::move(level[i + j]));
    }
    level = std::move(next);
  }
  json out = json::array();
  for (json& item : level) out.push_back(std::move(item));
  return out;
}

json PolicyJson(const Policy& policy) {
  json rows = json::array();
  for (int s = 0; s < policy.num_states(); ++s) {
    json row = json::array();
    for (int a = 0; a < policy.num_actions(); ++a) row.push_back(policy(s, a));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string SerializeGame(const MarkovGame& game) {
  const int n = game.num_states();
  const int nv = game.num_actions_victim();
  const int na = game.num_actions_attacker();
  json doc = json::object();
  doc["n_states"] = n;
  doc["n_actions_victim"] = nv;
  doc["n_actions_attacker"] = na;
  doc["gamma"] = game.gamma();
  doc["rho"] = game.initial_dist();
  doc["reward"] = Nest(game.reward_data(), {n, nv, na});
  doc["transition"] = Nest(game.transition_data(), {n, nv, na, n});
  if (game.rescale()) {
    doc["reward_rescale"] = {{"scale", game.rescale()->scale},
                             {"offset", game.rescale()->offset}};
  }
  return doc.dump(2) + "\n";
}

MarkovGame ParseGame(std::string_view text) {
  const json doc = Parse(text);
  const int n = Count(doc, "n_states");
  const int nv = Count(doc, "n_actions_victim");
  const int na = Count(doc, "n_actions_attacker");
  const double gamma = Number(Field(doc, "gamma"), "gamma");
  std::vector<double> rho;
  Flatten(Field(doc, "rho"), {n}, 0, "rho", rho);
  std::vector<double> reward;
  Flatten(Field(doc, "reward"), {n, nv, na}, 0, "reward", reward);
  std::vector<double> transition;
  Flatten(Field(doc, "transition"), {n, nv, na, n}, 0, "transition", transition);
  std::optional<RewardRescale> rescale;
  if (doc.contains("reward_rescale")) {
    const json& r = doc.at("reward_rescale");
    rescale = RewardRescale{Number(Field(r, "scale"), "reward_rescale.scale"),
                            Number(Field(r, "offset"), "reward_rescale.offset")};
  }
  return MarkovGame(n, nv, na, std::move(transition), std::move(reward),
                    std::move(rho), gamma, rescale);
}

std::string SerializePolicy(const Policy& policy) {
  return PolicyJson(policy).dump() + "\n";
}

Policy ParsePolicy(std::string_view text) {
  const json doc = Parse(text);
  if (!doc.is_array() || doc.empty() || !doc.front().is_array() ||
      doc.front().empty()) {
    throw std::invalid_argument("policy: expected a non-empty [s][a] array");
  }
  const int n = static_cast<int>(doc.size());
  const int a = static_cast<int>(doc.front().size());
  std::vector<double> flat;
  Flatten(doc, {n, a}, 0, "policy", flat);
  Eigen::MatrixXd probs(n, a);
  for (int s = 0; s < n; ++s) {
    for (int j = 0; j < a; ++j) probs(s, j) = flat[static_cast<size_t>(s) * a + j];
  }
  return Policy(std::move(probs));
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteTextFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

MarkovGame LoadGame(const std::string& path) {
  return ParseGame(ReadTextFile(path));
}

void SaveGame(const std::string& path, const MarkovGame& game) {
  WriteTextFile(path, SerializeGame(game));
}

Policy LoadPolicy(const std::string& path) {
  return ParsePolicy(ReadTextFile(path));
}

void SavePolicy(const std::string& path, const Policy& policy) {
  WriteTextFile(path, SerializePolicy(policy));
}

}  // namespace advtrain
