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

#ifndef ADVTRAIN_ANALYSIS_H_
#define ADVTRAIN_ANALYSIS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "advtrain/game.h"

namespace advtrain {

// A reported bound lhs <= rhs. pass <=> slack >= -kBoundSlackTol.
inline constexpr double kBoundSlackTol = 1e-9;

struct BoundReport {
  std::string bound;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  std::string instance;  // free-form descriptor (state/action, divergence, ...)
  std::uint64_t instance_seed = 0;
  double eps = 0.0;
};

// Builds a report with slack and pass filled in.
BoundReport MakeBoundReport(std::string bound, double lhs, double rhs,
                            double eps, std::string instance = {},
                            std::uint64_t seed = 0);

// max over states of the total-variation distance between the two rows.
double TvMax(const Policy& p, const Policy& q);

struct Divergences {
  double l1;
  double tv;
  double kl;         // KL(p || q) in nats
  double hellinger;  // sqrt(1 - sum_i sqrt(p_i q_i))
};

enum class Divergence { kTv, kKl, kHellinger };

std::string_view DivergenceName(Divergence f);

// Throws std::domain_error when KL(p || q) is undefined (q_i = 0 < p_i) and
// std::invalid_argument on size mismatch.
Divergences DistributionDivergences(const Eigen::VectorXd& p,
                                    const Eigen::VectorXd& q);
double KlDivergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
double HellingerDistance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
double TotalVariation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
double ComputeDivergence(Divergence f, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& q);

// |V(victim, benign) - V(victim, realized)| <= 2 eps / (1 - gamma)^2.
BoundReport VerifyValueBound(const MarkovGame& game, const Policy& victim,
                             const CoupledPolicy& coupled);

// ||d(victim, benign) - d(victim, realized)||_1 <= 2 gamma eps / (1 - gamma).
BoundReport VerifyVisitationBound(const MarkovGame& game, const Policy& victim,
                                  const CoupledPolicy& coupled);

// Victim-side marginal dynamics P_v(. | s, a_v) = E_{a_a ~ pi}[P(. | s, a_v, a_a)]
// under the realized and the benign attacker policies; one report per
// (s, a_v) comparing D_f of the marginals with D_f of the policies at s.
// When the policy-side KL is undefined the inequality is vacuous: the report
// carries rhs = +inf and passes.
std::vector<BoundReport> VerifyMarginalizedDynamicsBound(
    const MarkovGame& game, const CoupledPolicy& coupled, Divergence f);

// Marginal dynamics for one agent-alpha policy, indexed [s][a_v] -> next-state
// distribution.
Eigen::VectorXd MarginalizedDynamics(const MarkovGame& game,
                                     const Policy& attacker, int s, int av);

// Lipschitz bounds on the two gradients at (victim, coupled):
//   ||grad_v J|| <= sqrt(|A_v|) / (1 - gamma)^2
//   ||grad_a J|| <= eps sqrt(|A_a|) / (1 - gamma)^2
std::pair<BoundReport, BoundReport> ProbeLipschitz(const MarkovGame& game,
                                                   const Policy& victim,
                                                   const CoupledPolicy& coupled);

// Smoothness between two points sharing benign policy and budget:
//   ||grad_v J(x) - grad_v J(x')|| <= 2 sqrt(|A_v|) / (1 - gamma)^3 *
//       (sqrt(|A_v|) ||v - v'|| + sqrt(|A_a|) ||a - a'||)
// and the attacker analogue with an extra factor eps.
std::pair<BoundReport, BoundReport> ProbeSmoothness(
    const MarkovGame& game, const Policy& victim, const CoupledPolicy& coupled,
    const Policy& other_victim, const CoupledPolicy& other_coupled);

// Gradient-domination inequalities with a mismatch-coefficient estimate c:
//   J(v, a) - min_a' J(v, a') <= c / (1 - gamma) max_abar <grad_a J, a - abar>
//   max_v' J(v', a) - J(v, a) <= c / (1 - gamma) max_vbar <grad_v J, vbar - v>
// Returns (attacker side, victim side). Since c is a lower estimate of the true
// coefficient, a failure flags an underestimate rather than a violated bound.
std::pair<BoundReport, BoundReport> ProbeGradientDomination(
    const MarkovGame& game, const Policy& victim, const CoupledPolicy& coupled,
    double mismatch_estimate);

enum class MismatchMode { kEnumerateDeterministic, kRandomSample };

struct MismatchEstimate {
  double estimate = 1.0;
  MismatchMode mode = MismatchMode::kEnumerateDeterministic;
  int candidates_examined = 0;
};

// Lower estimate of the minimax mismatch coefficient
//   max{ max_v min_{a in BR(v)} ||d/rho||_inf, max_a min_{v in BR(a)} ||d/rho||_inf }
// over a finite candidate set. Best-response sets are all candidates within
// `tol` of the exact optimum. Enumerate mode uses every deterministic policy
// (requires |A|^|S| <= 1e6 for both agents); sample mode uses `samples`
// Dirichlet draws per agent as outer candidates and deterministic policies as
// inner ones. Requires rho > 0 entrywise.
MismatchEstimate EstimateMismatch(const MarkovGame& game, const Policy& benign,
                                  double eps, MismatchMode mode,
                                  int samples = 0, std::uint64_t seed = 0,
                                  double tol = 1e-8);

// All deterministic policies for `n_actions` actions over `n_states` states in
// lexicographic order (state 0 most significant).
std::vector<Policy> EnumerateDeterministicPolicies(int n_states, int n_actions);

}  // namespace advtrain

#endif  // ADVTRAIN_ANALYSIS_H_
