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

#include "aoi_guard/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

namespace aoi_guard {

DenseMatrix Multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError(fmt::format("cannot multiply {}x{} by {}x{}", a.rows(), a.cols(),
                                 b.rows(), b.cols()));
  }
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

double MaxAbsDiff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("matrix shapes differ");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

MarkovSource::MarkovSource(DenseMatrix transition, std::size_t delta_bound)
    : transition_(std::move(transition)), delta_bound_(delta_bound) {
  const std::size_t n = transition_.rows();
  if (n == 0 || transition_.cols() != n) {
    throw ValidationError(fmt::format("transition matrix must be square and non-empty, got {}x{}",
                                      transition_.rows(), transition_.cols()));
  }
  if (delta_bound_ < 1) throw ValidationError("delta_bound must be at least 1");
  for (std::size_t r = 0; r < n; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double v = transition_(r, c);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw ValidationError(
            fmt::format("transition row {} entry {} = {} is not a probability", r, c, v));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance) {
      throw ValidationError(fmt::format("transition row {} sums to {:.17g}, not 1", r, sum));
    }
  }
  powers_.resize(delta_bound_ + 1);
  powers_[0] = std::make_unique<const DenseMatrix>(DenseMatrix::Identity(n));
  if (delta_bound_ >= 1) powers_[1] = std::make_unique<const DenseMatrix>(transition_);
}

const DenseMatrix& MarkovSource::Power(std::size_t delta) const {
  if (delta > delta_bound_) {
    throw RangeError(fmt::format("step count {} exceeds cache bound {}", delta, delta_bound_));
  }
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (!powers_[delta]) {
    std::size_t filled = delta;
    while (!powers_[filled]) --filled;
    for (std::size_t d = filled + 1; d <= delta; ++d) {
      powers_[d] = std::make_unique<const DenseMatrix>(Multiply(*powers_[d - 1], transition_));
    }
  }
  return *powers_[delta];
}

std::span<const double> MarkovSource::StepDistribution(std::size_t x,
                                                       std::size_t delta) const {
  if (x >= state_count()) {
    throw RangeError(fmt::format("state {} outside source of {} states", x, state_count()));
  }
  return Power(delta).row(x);
}

std::size_t MarkovSource::SampleNext(std::size_t x, Rng& rng) const {
  if (x >= state_count()) {
    throw RangeError(fmt::format("state {} outside source of {} states", x, state_count()));
  }
  return rng.Categorical(transition_.row(x));
}

SafetyMap::SafetyMap(std::size_t label_count, std::vector<std::size_t> assignment)
    : label_count_(label_count), assignment_(std::move(assignment)) {
  if (label_count_ == 0) throw ValidationError("safety map needs at least one label");
  for (std::size_t x = 0; x < assignment_.size(); ++x) {
    if (assignment_[x] >= label_count_) {
      throw ValidationError(fmt::format("state {} mapped to label {}, but only {} labels exist",
                                        x, assignment_[x], label_count_));
    }
  }
}

SafetyMap SafetyMap::Identity(std::size_t state_count) {
  std::vector<std::size_t> assignment(state_count);
  for (std::size_t x = 0; x < state_count; ++x) assignment[x] = x;
  return SafetyMap(state_count, std::move(assignment));
}

SafetyMap SafetyMap::Bands(std::span<const std::size_t> band_sizes) {
  std::vector<std::size_t> assignment;
  for (std::size_t label = 0; label < band_sizes.size(); ++label) {
    assignment.insert(assignment.end(), band_sizes[label], label);
  }
  return SafetyMap(band_sizes.size(), std::move(assignment));
}

std::vector<double> StepDistribution(const MarkovSource& source, std::size_t x,
                                     std::size_t delta) {
  auto row = source.StepDistribution(x, delta);
  return {row.begin(), row.end()};
}

std::vector<double> SafetyDistribution(const MarkovSource& source, const SafetyMap& safety,
                                       std::size_t x, std::size_t delta) {
  if (safety.state_count() != source.state_count()) {
    throw ShapeError(fmt::format("safety map covers {} states, source has {}",
                                 safety.state_count(), source.state_count()));
  }
  auto row = source.StepDistribution(x, delta);
  std::vector<double> out(safety.label_count(), 0.0);
  for (std::size_t s = 0; s < row.size(); ++s) out[safety.label(s)] += row[s];
  return out;
}

std::vector<double> StationaryDistribution(const MarkovSource& source,
                                           const StationaryOptions& options) {
  const std::size_t n = source.state_count();
  const DenseMatrix& far = source.Power(source.delta_bound());
  for (double v : far.data()) {
    if (v <= 0.0) {
      throw ConvergenceError(
          fmt::format("source with {} states has no unique limiting law: P^{} has a zero entry",
                      n, source.delta_bound()),
          0.0);
    }
  }
  const DenseMatrix& p = source.transition();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  double diff = 0.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * p(i, j);
    }
    diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
    pi.swap(next);
    if (diff < options.tolerance) return pi;
  }
  throw ConvergenceError(
      fmt::format("stationary law of {}-state source did not converge in {} iterations",
                  n, options.max_iterations),
      diff);
}

std::vector<double> InitialStateLaw(const MarkovSource& source) {
  try {
    return StationaryDistribution(source);
  } catch (const ConvergenceError&) {
    return std::vector<double>(source.state_count(),
                               1.0 / static_cast<double>(source.state_count()));
  }
}

namespace {

void CheckMoveProbabilities(std::initializer_list<double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw ValidationError(fmt::format("move probability {} outside [0, 1]", p));
    }
    total += p;
  }
  if (total > 1.0 + kStochasticTolerance) {
    throw ValidationError(fmt::format("move probabilities sum to {} > 1", total));
  }
}

}  // namespace

DenseMatrix RowChainMatrix(std::size_t rows, double up, double down) {
  CheckMoveProbabilities({up, down});
  if (rows < 2) throw ValidationError("row chain needs at least 2 rows");
  DenseMatrix p(rows, rows);
  for (std::size_t r = 0; r < rows; ++r) {
    // Row 0 is the top edge.
    if (r > 0) p(r, r - 1) += up; else p(r, r) += up;
    if (r + 1 < rows) p(r, r + 1) += down; else p(r, r) += down;
    p(r, r) += 1.0 - up - down;
  }
  return p;
}

DenseMatrix GridChainMatrix(std::size_t rows, std::size_t cols, double up, double down,
                            double left, double right) {
  CheckMoveProbabilities({up, down, left, right});
  if (rows < 1 || cols < 1 || rows * cols < 2) {
    throw ValidationError("grid needs at least 2 cells");
  }
  DenseMatrix p(rows * cols, rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t s = r * cols + c;
      p(s, r > 0 ? s - cols : s) += up;
      p(s, r + 1 < rows ? s + cols : s) += down;
      p(s, c > 0 ? s - 1 : s) += left;
      p(s, c + 1 < cols ? s + 1 : s) += right;
      p(s, s) += 1.0 - up - down - left - right;
    }
  }
  return p;
}

SafetyMap GridSafetyFromRows(const SafetyMap& row_safety, std::size_t cols) {
  std::vector<std::size_t> assignment;
  assignment.reserve(row_safety.state_count() * cols);
  for (std::size_t r = 0; r < row_safety.state_count(); ++r) {
    assignment.insert(assignment.end(), cols, row_safety.label(r));
  }
  return SafetyMap(row_safety.label_count(), std::move(assignment));
}

SourcePtr BuildRowChain(std::size_t rows, double up, double down, std::size_t delta_bound) {
  return std::make_shared<const MarkovSource>(RowChainMatrix(rows, up, down), delta_bound);
}

}  // namespace aoi_guard
