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

#ifndef AOI_GUARD_TABLE_HPP_
#define AOI_GUARD_TABLE_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "aoi_guard/errors.hpp"

namespace aoi_guard {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  // Row-major values; throws ShapeError unless values.size() == rows * cols.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows * cols) throw ShapeError("matrix data does not match its shape");
  }

  static DenseMatrix Identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix Multiply(const DenseMatrix& a, const DenseMatrix& b);

// Largest absolute entrywise difference; shapes must agree.
double MaxAbsDiff(const DenseMatrix& a, const DenseMatrix& b);

// Table indexed by (age, observation) with age running from 1 to
// delta_bound inclusive.
template <typename T>
class StateTable {
 public:
  StateTable() = default;
  StateTable(std::size_t delta_bound, std::size_t state_count, T fill = T{})
      : delta_bound_(delta_bound),
        state_count_(state_count),
        values_(delta_bound * state_count, fill) {}

  std::size_t delta_bound() const { return delta_bound_; }
  std::size_t state_count() const { return state_count_; }

  T& at(std::size_t delta, std::size_t x) {
    check(delta, x);
    return values_[(delta - 1) * state_count_ + x];
  }
  const T& at(std::size_t delta, std::size_t x) const {
    check(delta, x);
    return values_[(delta - 1) * state_count_ + x];
  }

  // Unchecked access for inner loops; delta is 1-based.
  T& operator()(std::size_t delta, std::size_t x) {
    return values_[(delta - 1) * state_count_ + x];
  }
  const T& operator()(std::size_t delta, std::size_t x) const {
    return values_[(delta - 1) * state_count_ + x];
  }

  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }

  friend bool operator==(const StateTable&, const StateTable&) = default;

 private:
  void check(std::size_t delta, std::size_t x) const {
    if (delta < 1 || delta > delta_bound_ || x >= state_count_) {
      throw RangeError("state (" + std::to_string(delta) + ", " +
                       std::to_string(x) + ") outside table of " +
                       std::to_string(delta_bound_) + " ages x " +
                       std::to_string(state_count_) + " states");
    }
  }

  std::size_t delta_bound_ = 0;
  std::size_t state_count_ = 0;
  std::vector<T> values_;
};

}  // namespace aoi_guard

#endif  // AOI_GUARD_TABLE_HPP_
