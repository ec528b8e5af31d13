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

#ifndef AOI_GUARD_MARKOV_HPP_
#define AOI_GUARD_MARKOV_HPP_

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "aoi_guard/rng.hpp"
#include "aoi_guard/table.hpp"

namespace aoi_guard {

inline constexpr std::size_t kDefaultDeltaBound = 250;
inline constexpr double kStochasticTolerance = 1e-12;

// Finite-state time-homogeneous Markov chain with a cache of matrix powers
// P^0 .. P^delta_bound. Rows must already sum to one; nothing is
// renormalised. The cache fills lazily under a lock, so a source may be
// shared freely between threads.
class MarkovSource {
 public:
  explicit MarkovSource(DenseMatrix transition,
                        std::size_t delta_bound = kDefaultDeltaBound);

  MarkovSource(const MarkovSource&) = delete;
  MarkovSource& operator=(const MarkovSource&) = delete;

  std::size_t state_count() const { return transition_.rows(); }
  std::size_t delta_bound() const { return delta_bound_; }
  const DenseMatrix& transition() const { return transition_; }

  // P^delta for 0 <= delta <= delta_bound. The reference stays valid for the
  // lifetime of the source.
  const DenseMatrix& Power(std::size_t delta) const;

  // Row x of P^delta, i.e. the law of X_t given X_{t-delta} = x.
  std::span<const double> StepDistribution(std::size_t x, std::size_t delta) const;

  // Draws the successor of x from row x of P.
  std::size_t SampleNext(std::size_t x, Rng& rng) const;

 private:
  DenseMatrix transition_;
  std::size_t delta_bound_;
  mutable std::mutex cache_mutex_;
  mutable std::vector<std::unique_ptr<const DenseMatrix>> powers_;
};

using SourcePtr = std::shared_ptr<const MarkovSource>;

// Deterministic labelling Y = g(X) of source states into safety levels.
class SafetyMap {
 public:
  SafetyMap(std::size_t label_count, std::vector<std::size_t> assignment);

  // Identity labelling, one label per state.
  static SafetyMap Identity(std::size_t state_count);
  // Consecutive bands: band_sizes[k] states in a row map to label k.
  static SafetyMap Bands(std::span<const std::size_t> band_sizes);

  std::size_t label_count() const { return label_count_; }
  std::size_t state_count() const { return assignment_.size(); }
  std::size_t label(std::size_t x) const { return assignment_.at(x); }
  const std::vector<std::size_t>& assignment() const { return assignment_; }

 private:
  std::size_t label_count_;
  std::vector<std::size_t> assignment_;
};

std::vector<double> StepDistribution(const MarkovSource& source, std::size_t x,
                                     std::size_t delta);

// Law of the safety label delta slots after observing x.
std::vector<double> SafetyDistribution(const MarkovSource& source,
                                       const SafetyMap& safety, std::size_t x,
                                       std::size_t delta);

struct StationaryOptions {
  std::size_t max_iterations = 1'000'000;
  double tolerance = 1e-12;
};

// Power iteration from the uniform law. Throws ConvergenceError when P^delta_bound
// has a zero entry (reducible or periodic chain) or the cap is hit.
std::vector<double> StationaryDistribution(const MarkovSource& source,
                                           const StationaryOptions& options = {});

// Stationary law when it exists, otherwise uniform. Used to draw initial
// states.
std::vector<double> InitialStateLaw(const MarkovSource& source);

// Vertical motion on a column of `rows` cells. Moving past the top or bottom
// edge leaves the walker in place.
DenseMatrix RowChainMatrix(std::size_t rows, double up, double down);

// Four-direction walk on a rows x cols grid, state index = row * cols + col,
// with the same edge rule as the row chain.
DenseMatrix GridChainMatrix(std::size_t rows, std::size_t cols, double up, double down,
                            double left, double right);

// Labels grid states by their row through a per-row safety map.
SafetyMap GridSafetyFromRows(const SafetyMap& row_safety, std::size_t cols);

SourcePtr BuildRowChain(std::size_t rows, double up, double down,
                        std::size_t delta_bound = kDefaultDeltaBound);

}  // namespace aoi_guard

#endif  // AOI_GUARD_MARKOV_HPP_
