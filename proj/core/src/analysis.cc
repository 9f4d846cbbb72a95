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

#include "advtrain/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "advtrain/best_response.h"
#include "advtrain/evaluation.h"
#include "advtrain/gradients.h"
#include "advtrain/random_game.h"

namespace advtrain {
namespace {

void RequireSameSize(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size() || p.size() == 0) {
    throw std::invalid_argument("divergence: distributions differ in size");
  }
}

double Horizon(const MarkovGame& game) { return 1.0 / (1.0 - game.gamma()); }

// ||d / rho||_inf.
double VisitationRatio(const MarkovGame& game, const Eigen::MatrixXd& victim,
                       const Eigen::MatrixXd& attacker_realized) {
  const Eigen::VectorXd d =
      internal::Visitation(game, victim, attacker_realized);
  double worst = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    worst = std::max(worst, d(s) / game.initial(s));
  }
  return worst;
}

double CountPolicies(int n_states, int n_actions) {
  return std::pow(static_cast<double>(n_actions), n_states);
}

}  // namespace

BoundReport MakeBoundReport(std::string bound, double lhs, double rhs,
                            double eps, std::string instance,
                            std::uint64_t seed) {
  BoundReport r;
  r.bound = std::move(bound);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.pass = r.slack >= -kBoundSlackTol;
  r.instance = std::move(instance);
  r.instance_seed = seed;
  r.eps = eps;
  return r;
}

double TotalVariation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  RequireSameSize(p, q);
  return 0.5 * (p - q).lpNorm<1>();
}

double KlDivergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  RequireSameSize(p, q);
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    if (q(i) <= 0.0) {
      throw std::domain_error("KL divergence undefined: q has no mass where p does");
    }
    kl += p(i) * std::log(p(i) / q(i));
  }
  return std::max(0.0, kl);
}

double HellingerDistance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  RequireSameSize(p, q);
  // For normalized inputs 1 - sum sqrt(p q) = 0.5 sum (sqrt p - sqrt q)^2. The
  // right-hand form avoids cancellation when p and q are close.
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(std::max(0.0, p(i))) - std::sqrt(std::max(0.0, q(i)));
    sum += d * d;
  }
  return std::sqrt(0.5 * sum);
}

Divergences DistributionDivergences(const Eigen::VectorXd& p,
                                    const Eigen::VectorXd& q) {
  RequireSameSize(p, q);
  const double l1 = (p - q).lpNorm<1>();
  return {l1, 0.5 * l1, KlDivergence(p, q), HellingerDistance(p, q)};
}

std::string_view DivergenceName(Divergence f) {
  switch (f) {
    case Divergence::kTv: return "tv";
    case Divergence::kKl: return "kl";
    case Divergence::kHellinger: return "hellinger";
  }
  return "unknown";
}

double ComputeDivergence(Divergence f, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& q) {
  switch (f) {
    case Divergence::kTv: return TotalVariation(p, q);
    case Divergence::kKl: return KlDivergence(p, q);
    case Divergence::kHellinger: return HellingerDistance(p, q);
  }
  throw std::invalid_argument("unknown divergence");
}

double TvMax(const Policy& p, const Policy& q) {
  if (p.num_states() != q.num_states() || p.num_actions() != q.num_actions()) {
    throw std::invalid_argument("TvMax: policy shapes differ");
  }
  double worst = 0.0;
  for (int s = 0; s < p.num_states(); ++s) {
    worst = std::max(worst, 0.5 * (p.probs().row(s) - q.probs().row(s)).lpNorm<1>());
  }
  return worst;
}

BoundReport VerifyValueBound(const MarkovGame& game, const Policy& victim,
                             const CoupledPolicy& coupled) {
  const double benign = Value(game, victim, coupled.benign);
  const double attacked = Value(game, victim, coupled.Realized());
  const double h = Horizon(game);
  return MakeBoundReport("value", std::abs(benign - attacked),
                         2.0 * coupled.budget * h * h, coupled.budget);
}

BoundReport VerifyVisitationBound(const MarkovGame& game, const Policy& victim,
                                  const CoupledPolicy& coupled) {
  const OccupancyMeasure benign = StateVisitation(game, victim, coupled.benign);
  const OccupancyMeasure attacked =
      StateVisitation(game, victim, coupled.Realized());
  return MakeBoundReport("visitation", (benign.dist - attacked.dist).lpNorm<1>(),
                         2.0 * game.gamma() * coupled.budget * Horizon(game),
                         coupled.budget);
}

Eigen::VectorXd MarginalizedDynamics(const MarkovGame& game,
                                     const Policy& attacker, int s, int av) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(game.num_states());
  for (int aa = 0; aa < game.num_actions_attacker(); ++aa) {
    for (int next = 0; next < game.num_states(); ++next) {
      out(next) += attacker(s, aa) * game.transition(s, av, aa, next);
    }
  }
  return out;
}

std::vector<BoundReport> VerifyMarginalizedDynamicsBound(
    const MarkovGame& game, const CoupledPolicy& coupled, Divergence f) {
  RequireValid(game);
  RequireAttackerPolicy(game, coupled.benign);
  RequireAttackerPolicy(game, coupled.adversarial);
  const Policy realized = coupled.Realized();
  std::vector<BoundReport> out;
  for (int s = 0; s < game.num_states(); ++s) {
    const Eigen::VectorXd policy_p = realized.probs().row(s).transpose();
    const Eigen::VectorXd policy_q = coupled.benign.probs().row(s).transpose();
    double rhs = std::numeric_limits<double>::infinity();
    bool defined = true;
    try {
      rhs = ComputeDivergence(f, policy_p, policy_q);
    } catch (const std::domain_error&) {
      defined = false;
    }
    for (int av = 0; av < game.num_actions_victim(); ++av) {
      std::ostringstream instance;
      instance << DivergenceName(f) << " s=" << s << " a_v=" << av;
      if (!defined) {
        BoundReport r = MakeBoundReport("marginalized-dynamics", 0.0, rhs,
                                        coupled.budget, instance.str() + " vacuous");
        out.push_back(std::move(r));
        continue;
      }
      const double lhs =
          ComputeDivergence(f, MarginalizedDynamics(game, realized, s, av),
                            MarginalizedDynamics(game, coupled.benign, s, av));
      out.push_back(MakeBoundReport("marginalized-dynamics", lhs, rhs,
                                    coupled.budget, instance.str()));
    }
  }
  return out;
}

std::pair<BoundReport, BoundReport> ProbeLipschitz(
    const MarkovGame& game, const Policy& victim, const CoupledPolicy& coupled) {
  const GradientPair g = Gradients(game, victim, coupled);
  const double h2 = Horizon(game) * Horizon(game);
  const double nv = game.num_actions_victim();
  const double na = game.num_actions_attacker();
  return {MakeBoundReport("lipschitz-victim", g.victim.Norm(),
                          std::sqrt(nv) * h2, coupled.budget),
          MakeBoundReport("lipschitz-attacker", g.attacker.Norm(),
                          coupled.budget * std::sqrt(na) * h2, coupled.budget)};
}

std::pair<BoundReport, BoundReport> ProbeSmoothness(
    const MarkovGame& game, const Policy& victim, const CoupledPolicy& coupled,
    const Policy& other_victim, const CoupledPolicy& other_coupled) {
  if (coupled.budget != other_coupled.budget ||
      !(coupled.benign == other_coupled.benign)) {
    throw std::invalid_argument(
        "ProbeSmoothness: points must share the benign policy and budget");
  }
  const GradientPair g = Gradients(game, victim, coupled);
  const GradientPair h = Gradients(game, other_victim, other_coupled);
  const double eps = coupled.budget;
  const double h3 = std::pow(Horizon(game), 3);
  const double sv = std::sqrt(static_cast<double>(game.num_actions_victim()));
  const double sa = std::sqrt(static_cast<double>(game.num_actions_attacker()));
  const double distance =
      sv * (victim.probs() - other_victim.probs()).norm() +
      sa * (coupled.adversarial.probs() - other_coupled.adversarial.probs()).norm();
  return {
      MakeBoundReport("smoothness-victim",
                      (g.victim.per_state_action - h.victim.per_state_action).norm(),
                      2.0 * sv * h3 * distance, eps),
      MakeBoundReport(
          "smoothness-attacker",
          (g.attacker.per_state_action - h.attacker.per_state_action).norm(),
          2.0 * eps * sa * h3 * distance, eps)};
}

std::pair<BoundReport, BoundReport> ProbeGradientDomination(
    const MarkovGame& game, const Policy& victim, const CoupledPolicy& coupled,
    double mismatch_estimate) {
  const GradientPair g = Gradients(game, victim, coupled);
  const double eps = coupled.budget;
  const Eigen::MatrixXd& alpha = coupled.adversarial.probs();
  const Eigen::MatrixXd& nu = victim.probs();
  double attacker_gap = 0.0;
  double victim_gap = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    const auto ga = g.attacker.per_state_action.row(s);
    const auto gv = g.victim.per_state_action.row(s);
    attacker_gap += ga.dot(alpha.row(s)) - ga.minCoeff();
    victim_gap += gv.maxCoeff() - gv.dot(nu.row(s));
  }
  const double scale = mismatch_estimate * Horizon(game);
  const double attacker_lhs =
      g.value - BestResponseAttacker(game, victim, coupled.benign, eps).value;
  const double victim_lhs =
      BestResponseVictim(game, coupled.Realized()).value - g.value;
  return {MakeBoundReport("gradient-domination-attacker", attacker_lhs,
                          scale * attacker_gap, eps),
          MakeBoundReport("gradient-domination-victim", victim_lhs,
                          scale * victim_gap, eps)};
}

std::vector<Policy> EnumerateDeterministicPolicies(int n_states, int n_actions) {
  if (CountPolicies(n_states, n_actions) > 1e6) {
    throw std::invalid_argument("too many deterministic policies to enumerate");
  }
  std::vector<Policy> out;
  std::vector<int> actions(static_cast<size_t>(n_states), 0);
  for (;;) {
    out.push_back(Policy::Deterministic(actions, n_actions));
    int pos = n_states - 1;
    while (pos >= 0 && ++actions[pos] == n_actions) {
      actions[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

MismatchEstimate EstimateMismatch(const MarkovGame& game, const Policy& benign,
                                  double eps, MismatchMode mode, int samples,
                                  std::uint64_t seed, double tol) {
  RequireValid(game);
  RequireAttackerPolicy(game, benign);
  RequireBudget(eps);
  for (int s = 0; s < game.num_states(); ++s) {
    if (!(game.initial(s) > 0.0)) {
      throw std::invalid_argument(
          "mismatch coefficient needs a strictly positive initial distribution");
    }
  }
  const int n = game.num_states();
  const std::vector<Policy> det_victim =
      EnumerateDeterministicPolicies(n, game.num_actions_victim());
  const std::vector<Policy> det_attacker =
      EnumerateDeterministicPolicies(n, game.num_actions_attacker());

  std::vector<Policy> outer_victim;
  std::vector<Policy> outer_attacker;
  if (mode == MismatchMode::kEnumerateDeterministic) {
    outer_victim = det_victim;
    outer_attacker = det_attacker;
  } else {
    if (samples <= 0) {
      throw std::invalid_argument("random-sample mode needs samples > 0");
    }
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) {
      outer_victim.push_back(RandomPolicy(n, game.num_actions_victim(), rng));
      outer_attacker.push_back(RandomPolicy(n, game.num_actions_attacker(), rng));
    }
  }

  const Eigen::MatrixXd& b = benign.probs();
  auto realized = [&](const Policy& adv) {
    return Eigen::MatrixXd((1.0 - eps) * b + eps * adv.probs());
  };

  MismatchEstimate result;
  result.mode = mode;
  result.estimate = 1.0;
  // Victim outer, attacker best-response inner.
  for (const Policy& nu : outer_victim) {
    const double best =
        BestResponseAttacker(game, nu, benign, eps, tol).value;
    double inner = std::numeric_limits<double>::infinity();
    for (const Policy& alpha : det_attacker) {
      const Eigen::MatrixXd mix = realized(alpha);
      if (internal::Value(game, nu.probs(), mix) > best + tol) continue;
      inner = std::min(inner, VisitationRatio(game, nu.probs(), mix));
    }
    if (std::isfinite(inner)) result.estimate = std::max(result.estimate, inner);
    ++result.candidates_examined;
  }
  // Attacker outer, victim best-response inner.
  for (const Policy& alpha : outer_attacker) {
    const Eigen::MatrixXd mix = realized(alpha);
    const double best = BestResponseVictim(game, Policy(mix), tol).value;
    double inner = std::numeric_limits<double>::infinity();
    for (const Policy& nu : det_victim) {
      if (internal::Value(game, nu.probs(), mix) < best - tol) continue;
      inner = std::min(inner, VisitationRatio(game, nu.probs(), mix));
    }
    if (std::isfinite(inner)) result.estimate = std::max(result.estimate, inner);
    ++result.candidates_examined;
  }
  return result;
}

}  // namespace advtrain
