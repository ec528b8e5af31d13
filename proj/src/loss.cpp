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

#include "aoi_guard/loss.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace aoi_guard {

LossMatrix::LossMatrix(std::size_t label_count, std::vector<double> entries)
    : label_count_(label_count), entries_(std::move(entries)) {
  if (label_count_ == 0) throw ValidationError("loss matrix needs at least one label");
  if (entries_.size() != label_count_ * label_count_) {
    throw ShapeError(fmt::format("loss matrix for {} labels needs {} entries, got {}",
                                 label_count_, label_count_ * label_count_, entries_.size()));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i])) {
      throw ValidationError(fmt::format("loss entry ({}, {}) is not finite",
                                        i / label_count_, i % label_count_));
    }
  }
}

double LossMatrix::min_entry() const {
  return *std::min_element(entries_.begin(), entries_.end());
}

LossMatrix LossMatrix::Scaled(double factor) const {
  std::vector<double> scaled(entries_);
  for (double& v : scaled) v *= factor;
  return LossMatrix(label_count_, std::move(scaled));
}

LossMatrix ZeroOneLoss(std::size_t label_count) {
  std::vector<double> entries(label_count * label_count, 1.0);
  for (std::size_t y = 0; y < label_count; ++y) entries[y * label_count + y] = 0.0;
  return LossMatrix(label_count, std::move(entries));
}

LossMatrix QuadraticLoss(std::span<const double> label_values) {
  const std::size_t n = label_values.size();
  std::vector<double> entries(n * n);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t e = 0; e < n; ++e) {
      const double d = label_values[y] - label_values[e];
      entries[y * n + e] = d * d;
    }
  }
  return LossMatrix(n, std::move(entries));
}

LossMatrix SafetyExampleLoss() {
  // Rows: true level. Columns: reported level.
  return LossMatrix(3, {
                           0.0,    1.0,   5.0,   // safe
                           10.0,   0.0,   5.0,   // cautious
                           1000.0, 100.0, 0.0,   // dangerous
                       });
}

Estimate OptimalEstimate(std::span<const double> dist, const LossMatrix& loss) {
  const std::size_t n = loss.label_count();
  if (dist.size() != n) {
    throw ShapeError(fmt::format("distribution over {} labels used with {}-label loss",
                                 dist.size(), n));
  }
  Estimate best{0, 0.0};
  for (std::size_t e = 0; e < n; ++e) {
    double expected = 0.0;
    for (std::size_t y = 0; y < n; ++y) expected += dist[y] * loss(y, e);
    if (e == 0 || expected < best.expected_loss) best = {e, expected};
  }
  return best;
}

EstimationTables BuildTables(const MarkovSource& source, const SafetyMap& safety,
                             const LossMatrix& loss, std::size_t delta_bound) {
  if (delta_bound < 1) throw ValidationError("delta_bound must be at least 1");
  if (safety.label_count() != loss.label_count()) {
    throw ShapeError(fmt::format("safety map has {} labels, loss matrix has {}",
                                 safety.label_count(), loss.label_count()));
  }
  const std::size_t n = source.state_count();
  EstimationTables tables{PenaltyTable(delta_bound, n), EstimatorTable(delta_bound, n)};
  for (std::size_t delta = 1; delta <= delta_bound; ++delta) {
    for (std::size_t x = 0; x < n; ++x) {
      const Estimate est = OptimalEstimate(SafetyDistribution(source, safety, x, delta), loss);
      tables.penalty(delta, x) = est.expected_loss;
      tables.estimator(delta, x) = est.label;
    }
  }
  return tables;
}

EntropyPair ConditionalEntropyGiven(const ConditionalLaws& laws, const LossMatrix& loss) {
  if (laws.y_given_xz.size() != laws.x_given_z.size()) {
    throw ShapeError("need one conditional law of Y per value of X");
  }
  const std::size_t labels = loss.label_count();
  std::vector<double> y_given_z(labels, 0.0);
  double with_side_info = 0.0;
  for (std::size_t x = 0; x < laws.x_given_z.size(); ++x) {
    const auto& y_law = laws.y_given_xz[x];
    if (y_law.size() != labels) throw ShapeError("conditional law of Y has wrong size");
    for (std::size_t y = 0; y < labels; ++y) y_given_z[y] += laws.x_given_z[x] * y_law[y];
    with_side_info += laws.x_given_z[x] * OptimalEstimate(y_law, loss).expected_loss;
  }
  return {OptimalEstimate(y_given_z, loss).expected_loss, with_side_info};
}

}  // namespace aoi_guard
