// Copyright 2026 The aoi_guard Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AOI_GUARD_BANDIT_HPP_
#define AOI_GUARD_BANDIT_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aoi_guard/agent_class.hpp"
#include "aoi_guard/table.hpp"

namespace aoi_guard {

struct RviSettings {
  double tol = 1e-9;
  std::size_t max_iters = 100'000;
  // Every this many sweeps the greedy policy is evaluated exactly and h is
  // replaced by its value (0 disables). Convergence is still judged by the
  // span of successive sweeps.
  std::size_t evaluate_every = 25;
};

// Average-cost solution of one bandit at transmission price lambda. The
// relative value h is pinned to zero at (delta = 1, x = 0). All action values
// already subtract avg_cost.
struct BanditSolution {
  double lambda = 0.0;
  double avg_cost = 0.0;
  StateTable<double> h;
  StateTable<double> q_active;
  StateTable<double> q_passive;
  // q_passive - q_active; positive means transmitting is strictly better.
  StateTable<double> gain;
  std::size_t iterations = 0;
  double final_span = 0.0;

  // Greedy action of the single-bandit problem. Ties stay passive.
  bool Activates(std::size_t delta, std::size_t x) const { return gain(delta, x) > 0.0; }
};

// Relative value iteration on the (age, observation) state space. Ages past
// the table bound stay at the bound. `warm_start`, when given, seeds h.
BanditSolution RelativeValueIteration(const PenaltyTable& penalty, const MarkovSource& source,
                                      double success_prob, double lambda,
                                      const RviSettings& settings,
                                      const StateTable<double>* warm_start = nullptr);

inline BanditSolution SolveClass(const AgentClass& cls, double lambda,
                                 const RviSettings& settings,
                                 const StateTable<double>* warm_start = nullptr) {
  return RelativeValueIteration(cls.tables.penalty, *cls.spec.source, cls.spec.success_prob,
                                lambda, settings, warm_start);
}

double GainIndex(const BanditSolution& solution, std::size_t delta, std::size_t x);

// max over states of |h - min(q_active, q_passive)|.
double BellmanResidual(const BanditSolution& solution);

struct DualSettings {
  double beta = 0.3;
  std::size_t eval_horizon = 20'000;
  std::size_t outer_iters = 60;
  // Accepted relative deviation of the relaxed activation rate from M.
  double rate_band = 0.05;
};

struct DualStep {
  std::size_t iteration;
  double lambda;
  double activation_rate;
};

struct DualTrace {
  std::vector<DualStep> steps;
  double lambda_star = 0.0;
};

struct DualResult {
  double lambda_star = 0.0;
  DualTrace trace;
  std::vector<BanditSolution> solutions;  // one per class, solved at lambda_star
  double activation_rate = 0.0;           // relaxed rate measured at lambda_star
  bool rate_in_band = false;              // false means the best iterate is returned
  double dual_value = 0.0;
};

// One projected subgradient step: max(0, lambda + step * (rate - channels)).
double DualUpdate(double lambda, double step, double activation_rate, double channels);

// Mean number of activations per slot when every agent follows its own
// greedy single-bandit policy with no channel coupling.
double RelaxedActivationRate(const std::vector<AgentClass>& classes,
                             const std::vector<BanditSolution>& solutions, std::size_t horizon,
                             std::uint64_t seed);

// Lagrangian dual value: sum over agents of avg_cost(lambda) - lambda * M.
// By weak duality this lower-bounds the total penalty of any policy that
// respects the channel budget.
double DualValue(const std::vector<AgentClass>& classes,
                 const std::vector<BanditSolution>& solutions, double lambda,
                 std::size_t channels);

// Stochastic dual subgradient ascent on the transmission price. Solves each
// class at lambda(j), measures the relaxed activation rate over
// eval_horizon slots and steps with beta / j.
DualResult DualAscent(const std::vector<AgentClass>& classes, std::size_t channels,
                      const DualSettings& dual, const RviSettings& rvi, std::uint64_t seed);

}  // namespace aoi_guard

#endif  // AOI_GUARD_BANDIT_HPP_
