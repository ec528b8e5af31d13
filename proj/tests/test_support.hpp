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

// Random instances and independent reference computations shared by the
// test binaries. Nothing here calls into the solver code paths it checks.

#ifndef AOI_GUARD_TESTS_TEST_SUPPORT_HPP_
#define AOI_GUARD_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "aoi_guard/loss.hpp"
#include "aoi_guard/markov.hpp"

namespace aoi_guard::testing {

inline std::vector<double> RandomSimplex(std::size_t n, std::mt19937_64& gen) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> v(n);
  double total = 0.0;
  for (double& e : v) total += (e = expo(gen));
  for (double& e : v) e /= total;
  // Push the rounding residue into the largest entry so the row sums to 1
  // within the source's tolerance.
  double sum = 0.0;
  for (double e : v) sum += e;
  *std::max_element(v.begin(), v.end()) += 1.0 - sum;
  return v;
}

// Dense positive rows, hence irreducible and aperiodic.
inline DenseMatrix RandomErgodicMatrix(std::size_t n, std::mt19937_64& gen) {
  DenseMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = RandomSimplex(n, gen);
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

// Rows with a random support of size >= 1; may be reducible or periodic.
inline DenseMatrix RandomSparseMatrix(std::size_t n, std::mt19937_64& gen) {
  DenseMatrix m(n, n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t support = 1 + pick(gen);
    std::vector<std::size_t> cols(n);
    for (std::size_t c = 0; c < n; ++c) cols[c] = c;
    std::shuffle(cols.begin(), cols.end(), gen);
    auto w = RandomSimplex(support, gen);
    for (std::size_t k = 0; k < support; ++k) m(r, cols[k]) = w[k];
  }
  return m;
}

inline SafetyMap RandomSafety(std::size_t states, std::size_t labels, std::mt19937_64& gen) {
  std::uniform_int_distribution<std::size_t> pick(0, labels - 1);
  std::vector<std::size_t> assignment(states);
  for (auto& a : assignment) a = pick(gen);
  return SafetyMap(labels, assignment);
}

inline LossMatrix RandomLoss(std::size_t labels, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 10.0);
  std::vector<double> entries(labels * labels);
  for (double& e : entries) e = u(gen);
  return LossMatrix(labels, entries);
}

struct BruteEntry {
  double penalty;
  std::size_t estimate;
};

// Propagates the point mass at x through delta transitions one vector step at
// a time, then tries every estimate. Ties go to the lowest label.
inline BruteEntry BruteForceEntry(const DenseMatrix& p, const SafetyMap& safety,
                                  const LossMatrix& loss, std::size_t x, std::size_t delta) {
  const std::size_t n = p.rows();
  std::vector<double> v(n, 0.0);
  v[x] = 1.0;
  for (std::size_t step = 0; step < delta; ++step) {
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) next[j] += v[i] * p(i, j);
    }
    v = next;
  }
  std::vector<double> labels(safety.label_count(), 0.0);
  for (std::size_t i = 0; i < n; ++i) labels[safety.label(i)] += v[i];
  BruteEntry best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t e = 0; e < labels.size(); ++e) {
    double total = 0.0;
    for (std::size_t y = 0; y < labels.size(); ++y) total += labels[y] * loss(y, e);
    if (total < best.penalty) best = {total, e};
  }
  return best;
}

// Plain relative value iteration with a fixed number of Jacobi sweeps and
// no acceleration. Returns the gain table, indexed [delta - 1][x].
inline std::vector<std::vector<double>> StraightLineGain(const DenseMatrix& p,
                                                         const SafetyMap& safety,
                                                         const LossMatrix& loss,
                                                         std::size_t bound, double success,
                                                         double lambda, std::size_t sweeps) {
  const std::size_t n = p.rows();
  std::vector<DenseMatrix> pw{DenseMatrix::Identity(n)};
  for (std::size_t d = 1; d <= bound; ++d) pw.push_back(Multiply(pw.back(), p));
  std::vector<std::vector<double>> q(bound + 1, std::vector<double>(n, 0.0));
  for (std::size_t d = 1; d <= bound; ++d) {
    for (std::size_t x = 0; x < n; ++x) q[d][x] = BruteForceEntry(p, safety, loss, x, d).penalty;
  }
  std::vector<std::vector<double>> h(bound + 1, std::vector<double>(n, 0.0));
  auto expect_fresh = [&](std::size_t d, std::size_t x) {
    double e = 0.0;
    for (std::size_t y = 0; y < n; ++y) e += pw[d](x, y) * h[1][y];
    return e;
  };
  for (std::size_t it = 0; it < sweeps; ++it) {
    auto next = h;
    for (std::size_t d = 1; d <= bound; ++d) {
      const std::size_t up = std::min(d + 1, bound);
      for (std::size_t x = 0; x < n; ++x) {
        const double passive = q[d][x] + h[up][x];
        const double active =
            q[d][x] + (1.0 - success) * h[up][x] + success * expect_fresh(d, x) + lambda;
        next[d][x] = std::min(passive, active);
      }
    }
    const double ref = next[1][0];
    for (auto& row : next) {
      for (double& v : row) v -= ref;
    }
    h = next;
  }
  std::vector<std::vector<double>> gain(bound, std::vector<double>(n));
  for (std::size_t d = 1; d <= bound; ++d) {
    const std::size_t up = std::min(d + 1, bound);
    for (std::size_t x = 0; x < n; ++x) {
      const double active_tail =
          (1.0 - success) * h[up][x] + success * expect_fresh(d, x) + lambda;
      gain[d - 1][x] = h[up][x] - active_tail;
    }
  }
  return gain;
}

}  // namespace aoi_guard::testing

#endif  // AOI_GUARD_TESTS_TEST_SUPPORT_HPP_
