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

#include "aoi_guard/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace aoi_guard {

namespace {

// Exact average-cost evaluation of a fixed stationary policy. Under a fixed
// policy every h(delta, x) is affine in (h(1, .), g), so a backward pass over
// ages reduces the evaluation to an n x n solve. Returns false when the
// policy is passive at the age bound for some x (that state then absorbs and
// the chain has more than one recurrent class).
bool EvaluatePolicy(const PenaltyTable& penalty, const MarkovSource& source, double p,
                    double lambda, const std::vector<char>& active, StateTable<double>& h) {
  const std::size_t bound = penalty.delta_bound();
  const std::size_t n = penalty.state_count();
  auto is_active = [&](std::size_t d, std::size_t x) { return active[(d - 1) * n + x] != 0; };
  for (std::size_t x = 0; x < n; ++x) {
    if (!is_active(bound, x)) return false;
  }
  // coef row layout: [v(0..n-1), g, constant]
  const std::size_t width = n + 2;
  Eigen::MatrixXd coef(n, width);
  for (std::size_t x = 0; x < n; ++x) {
    auto row = source.Power(bound).row(x);
    coef.row(x).setZero();
    for (std::size_t s = 0; s < n; ++s) coef(x, s) = row[s];
    coef(x, n) = -1.0 / p;
    coef(x, n + 1) = (penalty(bound, x) + lambda) / p;
  }
  for (std::size_t d = bound - 1; d >= 1; --d) {
    const DenseMatrix& pd = source.Power(d);
    for (std::size_t x = 0; x < n; ++x) {
      if (is_active(d, x)) {
        coef.row(x) *= (1.0 - p);
        for (std::size_t s = 0; s < n; ++s) coef(x, s) += p * pd(x, s);
        coef(x, n + 1) += penalty(d, x) + lambda;
      } else {
        coef(x, n + 1) += penalty(d, x);
      }
      coef(x, n) -= 1.0;
    }
  }
  // h(1, x) = v(x) with v(0) = 0; unknowns are v(1..n-1) and g.
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd b(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t s = 1; s < n; ++s) a(x, s - 1) = coef(x, s) - (s == x ? 1.0 : 0.0);
    a(x, n - 1) = coef(x, n);
    b(x) = -coef(x, n + 1);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd sol = lu.solve(b);
  if (!sol.allFinite()) return false;
  std::vector<double> v(n, 0.0);
  for (std::size_t s = 1; s < n; ++s) v[s] = sol(s - 1);
  const double g = sol(n - 1);

  std::vector<double> fresh(n);
  auto expected = [&](std::size_t d) {
    const DenseMatrix& pd = source.Power(d);
    for (std::size_t x = 0; x < n; ++x) {
      double acc = 0.0;
      for (std::size_t s = 0; s < n; ++s) acc += pd(x, s) * v[s];
      fresh[x] = acc;
    }
  };
  expected(bound);
  for (std::size_t x = 0; x < n; ++x) {
    h(bound, x) = (penalty(bound, x) - g + lambda + p * fresh[x]) / p;
  }
  for (std::size_t d = bound - 1; d >= 1; --d) {
    expected(d);
    for (std::size_t x = 0; x < n; ++x) {
      const double base = penalty(d, x) - g + h(d + 1, x);
      h(d, x) = is_active(d, x) ? base - p * h(d + 1, x) + p * fresh[x] + lambda : base;
    }
  }
  // Pin the reference exactly; the solve leaves only rounding there.
  const double ref = h(1, 0);
  for (double& value : h.values()) value -= ref;
  return true;
}

}  // namespace

BanditSolution RelativeValueIteration(const PenaltyTable& penalty, const MarkovSource& source,
                                      double success_prob, double lambda,
                                      const RviSettings& settings,
                                      const StateTable<double>* warm_start) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError(fmt::format("transmission price {} must be finite and >= 0", lambda));
  }
  if (!(settings.tol > 0.0)) throw ValidationError("RVI tolerance must be positive");
  if (!(success_prob > 0.0 && success_prob <= 1.0)) {
    throw ValidationError(fmt::format("success probability {} outside (0, 1]", success_prob));
  }
  const std::size_t bound = penalty.delta_bound();
  const std::size_t n = penalty.state_count();
  if (n != source.state_count()) {
    throw ShapeError(fmt::format("penalty table has {} states, source has {}", n,
                                 source.state_count()));
  }
  if (bound > source.delta_bound()) {
    throw RangeError(fmt::format("penalty table reaches age {}, source caches only {}", bound,
                                 source.delta_bound()));
  }

  // E[h(1, X') | X_{-delta} = x] is the delta-fold product P^delta h(1, .),
  // computed as P applied to the (delta - 1)-step result so only nonzeros
  // of P are touched.
  struct Entry {
    std::size_t col;
    double prob;
  };
  const DenseMatrix& one_step = source.transition();
  std::vector<std::vector<Entry>> sparse(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t s = 0; s < n; ++s) {
      if (one_step(x, s) != 0.0) sparse[x].push_back({s, one_step(x, s)});
    }
  }

  StateTable<double> h(bound, n, 0.0);
  if (warm_start != nullptr && warm_start->delta_bound() == bound &&
      warm_start->state_count() == n) {
    h = *warm_start;
  }
  StateTable<double> next(bound, n);
  // fresh[(delta - 1) * n + x] = E[h(1, X') | X_{-delta} = x]
  std::vector<double> fresh(bound * n);
  const double p = success_prob;

  auto expected_fresh = [&](const StateTable<double>& values) {
    const double* prev = nullptr;
    std::vector<double> base(n);
    for (std::size_t s = 0; s < n; ++s) base[s] = values(1, s);
    prev = base.data();
    for (std::size_t d = 1; d <= bound; ++d) {
      double* out = fresh.data() + (d - 1) * n;
      for (std::size_t x = 0; x < n; ++x) {
        double acc = 0.0;
        for (const Entry& e : sparse[x]) acc += e.prob * prev[e.col];
        out[x] = acc;
      }
      prev = out;
    }
  };

  std::vector<char> greedy(bound * n, 0);
  double span = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (it < settings.max_iters) {
    ++it;
    expected_fresh(h);
    for (std::size_t d = 1; d <= bound; ++d) {
      const std::size_t older = std::min(d + 1, bound);
      for (std::size_t x = 0; x < n; ++x) {
        const double stay = h(older, x);
        const double passive = penalty(d, x) + stay;
        const double active =
            penalty(d, x) + (1.0 - p) * stay + p * fresh[(d - 1) * n + x] + lambda;
        next(d, x) = std::min(passive, active);
      }
    }
    const double offset = next(1, 0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    auto nv = next.values();
    auto hv = h.values();
    for (std::size_t i = 0; i < nv.size(); ++i) {
      nv[i] -= offset;
      const double diff = nv[i] - hv[i];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw NumericError("relative value iteration produced a non-finite value");
    }
    span = hi - lo;
    std::swap(h, next);
    if (span < settings.tol) break;
    if (settings.evaluate_every > 0 && it % settings.evaluate_every == 0) {
      // Jump to the exact value of the current greedy policy; later sweeps
      // either confirm it or improve the policy.
      expected_fresh(h);
      for (std::size_t d = 1; d <= bound; ++d) {
        const std::size_t older = std::min(d + 1, bound);
        for (std::size_t x = 0; x < n; ++x) {
          const double stay = h(older, x);
          greedy[(d - 1) * n + x] =
              (1.0 - p) * stay + p * fresh[(d - 1) * n + x] + lambda < stay ? 1 : 0;
        }
      }
      if (EvaluatePolicy(penalty, source, p, lambda, greedy, next)) std::swap(h, next);
    }
  }
  if (!(span < settings.tol)) {
    // A policy that stays passive at the age bound turns (bound, x) into
    // absorbing states; unless q has saturated there their costs differ and
    // the relative values drift instead of converging.
    double spread = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      spread = std::max(spread, std::abs(penalty(bound, x) - penalty(bound, 0)));
    }
    const std::string hint =
        spread > settings.tol
            ? fmt::format("; q varies by {:.3e} across observations at the age bound {}, "
                          "consider a larger delta_bound",
                          spread, bound)
            : "";
    throw ConvergenceError(
        fmt::format("relative value iteration at lambda={} did not converge in {} sweeps "
                    "(span {:.3e}){}",
                    lambda, settings.max_iters, span, hint),
        span);
  }

  BanditSolution sol;
  sol.lambda = lambda;
  sol.iterations = it;
  sol.final_span = span;
  sol.q_active = StateTable<double>(bound, n);
  sol.q_passive = StateTable<double>(bound, n);
  sol.gain = StateTable<double>(bound, n);

  // One more Bellman evaluation on the converged h gives the action values
  // and the average cost offset at the reference state.
  expected_fresh(h);
  for (std::size_t d = 1; d <= bound; ++d) {
    const std::size_t older = std::min(d + 1, bound);
    for (std::size_t x = 0; x < n; ++x) {
      const double stay = h(older, x);
      sol.q_passive(d, x) = penalty(d, x) + stay;
      sol.q_active(d, x) =
          penalty(d, x) + (1.0 - p) * stay + p * fresh[(d - 1) * n + x] + lambda;
    }
  }
  sol.avg_cost = std::min(sol.q_passive(1, 0), sol.q_active(1, 0));
  auto qp = sol.q_passive.values();
  auto qa = sol.q_active.values();
  auto g = sol.gain.values();
  for (std::size_t i = 0; i < qp.size(); ++i) {
    qp[i] -= sol.avg_cost;
    qa[i] -= sol.avg_cost;
    g[i] = qp[i] - qa[i];
  }
  sol.h = std::move(h);
  return sol;
}

double GainIndex(const BanditSolution& solution, std::size_t delta, std::size_t x) {
  return solution.gain.at(delta, x);
}

double BellmanResidual(const BanditSolution& solution) {
  double worst = 0.0;
  const std::size_t bound = solution.h.delta_bound();
  const std::size_t n = solution.h.state_count();
  for (std::size_t d = 1; d <= bound; ++d) {
    for (std::size_t x = 0; x < n; ++x) {
      const double rhs = std::min(solution.q_active(d, x), solution.q_passive(d, x));
      worst = std::max(worst, std::abs(solution.h(d, x) - rhs));
    }
  }
  return worst;
}

double DualUpdate(double lambda, double step, double activation_rate, double channels) {
  return std::max(0.0, lambda + step * (activation_rate - channels));
}

double RelaxedActivationRate(const std::vector<AgentClass>& classes,
                             const std::vector<BanditSolution>& solutions, std::size_t horizon,
                             std::uint64_t seed) {
  if (solutions.size() != classes.size()) {
    throw ShapeError("need one bandit solution per class");
  }
  if (horizon == 0) throw ValidationError("evaluation horizon must be positive");
  std::uint64_t activations = 0;
  std::size_t agent = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const AgentClass& cls = classes[c];
    const BanditSolution& sol = solutions[c];
    const MarkovSource& source = *cls.spec.source;
    const std::size_t bound = sol.gain.delta_bound();
    const double p = cls.spec.success_prob;
    const std::vector<double> init = InitialStateLaw(source);
    for (std::size_t m = 0; m < cls.spec.member_count; ++m, ++agent) {
      Rng rng = Rng::Derive(seed, StreamPurpose::kRelaxed, agent);
      std::size_t x = rng.Categorical(init);
      std::size_t delta = 1;
      for (std::size_t t = 0; t < horizon; ++t) {
        const double u = rng.Uniform();
        if (sol.Activates(delta, x)) {
          ++activations;
          if (u < p) {
            x = rng.Categorical(source.StepDistribution(x, delta));
            delta = 1;
            continue;
          }
        }
        delta = std::min(delta + 1, bound);
      }
    }
  }
  const double rate = static_cast<double>(activations) / static_cast<double>(horizon);
  if (!std::isfinite(rate)) throw NumericError("activation rate is not finite");
  return rate;
}

double DualValue(const std::vector<AgentClass>& classes,
                 const std::vector<BanditSolution>& solutions, double lambda,
                 std::size_t channels) {
  double total = 0.0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    total += static_cast<double>(classes[c].spec.member_count) * solutions[c].avg_cost;
  }
  return total - lambda * static_cast<double>(channels);
}

DualResult DualAscent(const std::vector<AgentClass>& classes, std::size_t channels,
                      const DualSettings& dual, const RviSettings& rvi, std::uint64_t seed) {
  if (classes.empty()) throw ValidationError("dual ascent needs at least one class");
  if (!(dual.beta > 0.0)) throw ValidationError("dual step scale beta must be positive");
  if (dual.eval_horizon < 1 || dual.outer_iters < 1) {
    throw ValidationError("eval_horizon and outer_iters must be at least 1");
  }
  const double m = static_cast<double>(channels);
  const double band = dual.rate_band * m;

  struct Iterate {
    double lambda;
    double rate;
    std::vector<BanditSolution> solutions;
  };
  std::vector<BanditSolution> current;
  std::vector<Iterate> kept;  // latest in-band iterate, or best so far
  bool have_in_band = false;
  DualResult result;

  double lambda = 0.0;
  for (std::size_t j = 1; j <= dual.outer_iters; ++j) {
    std::vector<BanditSolution> solved;
    solved.reserve(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const StateTable<double>* warm = current.empty() ? nullptr : &current[c].h;
      solved.push_back(SolveClass(classes[c], lambda, rvi, warm));
    }
    const double rate = RelaxedActivationRate(classes, solved, dual.eval_horizon, seed);
    result.trace.steps.push_back({j, lambda, rate});

    const bool in_band = std::abs(rate - m) <= band;
    if (in_band) {
      kept.assign(1, Iterate{lambda, rate, solved});
      have_in_band = true;
    } else if (!have_in_band &&
               (kept.empty() || std::abs(rate - m) < std::abs(kept.front().rate - m))) {
      kept.assign(1, Iterate{lambda, rate, solved});
    }
    current = std::move(solved);
    lambda = DualUpdate(lambda, dual.beta / static_cast<double>(j), rate, m);
  }

  Iterate& chosen = kept.front();
  result.lambda_star = chosen.lambda;
  result.activation_rate = chosen.rate;
  result.rate_in_band = have_in_band;
  result.solutions = std::move(chosen.solutions);
  result.trace.lambda_star = result.lambda_star;
  result.dual_value = DualValue(classes, result.solutions, result.lambda_star, channels);
  return result;
}

}  // namespace aoi_guard
