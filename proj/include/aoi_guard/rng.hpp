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

#ifndef AOI_GUARD_RNG_HPP_
#define AOI_GUARD_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace aoi_guard {

// Independent named streams derived from one master seed. Each simulated
// agent owns one stream per purpose so that policies can be compared on
// common random numbers.
enum class StreamPurpose : std::uint32_t {
  kMotion = 1,
  kChannel = 2,
  kPolicy = 3,
  kInitial = 4,
  kRelaxed = 5,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Stream for (master seed, purpose, index), decorrelated through seed_seq.
  static Rng Derive(std::uint64_t master, StreamPurpose purpose, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master),
                      static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(purpose),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    Rng rng(0);
    rng.engine_.seed(seq);
    return rng;
  }

  // Uniform on [0, 1).
  double Uniform() { return unit_(engine_); }

  // Uniform on {0, ..., n - 1}; n > 0.
  std::size_t Below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  // Index drawn from a probability vector by inverse CDF. Rounding slack in
  // the tail lands on the last index with positive mass.
  std::size_t Categorical(std::span<const double> probs) {
    double u = Uniform();
    std::size_t last = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      last = i;
      if (u < probs[i]) return i;
      u -= probs[i];
    }
    return last;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace aoi_guard

#endif  // AOI_GUARD_RNG_HPP_
