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

#ifndef AOI_GUARD_LOSS_HPP_
#define AOI_GUARD_LOSS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "aoi_guard/markov.hpp"
#include "aoi_guard/table.hpp"

namespace aoi_guard {

// Label indices used by the three-level safety loss.
enum SafetyLevel : std::size_t { kSafe = 0, kCautious = 1, kDangerous = 2 };

// L(y, y_hat): loss of reporting y_hat when the true label is y. Any finite
// real values are accepted, including a nonzero diagonal.
class LossMatrix {
 public:
  LossMatrix(std::size_t label_count, std::vector<double> entries);

  std::size_t label_count() const { return label_count_; }
  double operator()(std::size_t truth, std::size_t estimate) const {
    return entries_[truth * label_count_ + estimate];
  }
  double min_entry() const;
  LossMatrix Scaled(double factor) const;

 private:
  std::size_t label_count_;
  std::vector<double> entries_;
};

LossMatrix ZeroOneLoss(std::size_t label_count);
LossMatrix QuadraticLoss(std::span<const double> label_values);
// Three levels (safe, cautious, dangerous) with heavy penalties for
// under-reporting danger.
LossMatrix SafetyExampleLoss();

struct Estimate {
  std::size_t label;
  double expected_loss;
};

// Bayes action for a label distribution: argmin over y_hat of
// sum_y dist[y] L(y, y_hat), lowest label on ties. The attained minimum is the
// L-entropy of the distribution.
Estimate OptimalEstimate(std::span<const double> dist, const LossMatrix& loss);

using PenaltyTable = StateTable<double>;
using EstimatorTable = StateTable<std::size_t>;

// Penalty q(delta, x) and Bayes estimate f(delta, x) for every age up to
// delta_bound and every observation.
struct EstimationTables {
  PenaltyTable penalty;
  EstimatorTable estimator;
};

EstimationTables BuildTables(const MarkovSource& source, const SafetyMap& safety,
                             const LossMatrix& loss, std::size_t delta_bound);

// Conditional laws for the conditioning lemma: z is fixed, x ranges over
// x_given_z.size() values and y_given_xz[x] is the law of Y given (X=x, Z=z).
struct ConditionalLaws {
  std::vector<double> x_given_z;
  std::vector<std::vector<double>> y_given_xz;
};

struct EntropyPair {
  double without_side_info;  // H_L(Y | Z=z)
  double with_side_info;     // H_L(Y | X, Z=z)
};

EntropyPair ConditionalEntropyGiven(const ConditionalLaws& laws, const LossMatrix& loss);

}  // namespace aoi_guard

#endif  // AOI_GUARD_LOSS_HPP_
