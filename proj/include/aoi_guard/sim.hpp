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

#ifndef AOI_GUARD_SIM_HPP_
#define AOI_GUARD_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aoi_guard/agent_class.hpp"
#include "aoi_guard/bandit.hpp"
#include "aoi_guard/scheduler.hpp"

namespace aoi_guard {

struct SimConfig {
  std::vector<AgentClass> classes;
  std::size_t channels = 1;
  std::uint64_t slots = 100'000;
  std::uint64_t warmup = 10'000;
  std::uint64_t seed = 1;
  PolicyKind policy = PolicyKind::kMgf;
  std::size_t delta_bound = kDefaultDeltaBound;
  // Scale parameter reported in outputs (1 outside scale sweeps).
  double scale = 1.0;

  std::size_t agent_count() const { return TotalAgents(classes); }
  void Validate() const;
};

struct SimRecord {
  PolicyKind policy = PolicyKind::kMgf;
  std::size_t agents = 0;
  std::size_t channels = 0;
  double scale = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t slots = 0;
  double total_loss = 0.0;
  // total_loss / ((slots - warmup) * agents)
  double normalized_penalty = 0.0;
  // Mean transmissions per slot.
  double activation_rate = 0.0;
  double mean_aoi = 0.0;
  std::uint64_t deliveries = 0;
  std::vector<double> per_agent_mean_aoi;
};

// 1 after a pull that got through, otherwise one slot older.
constexpr std::uint64_t AdvanceAoi(std::uint64_t delta, bool pulled, bool delivered) {
  return pulled && delivered ? 1 : delta + 1;
}

// One seeded replication. Each slot: the receiver estimates every agent's
// safety level from its (age, observation) state and the loss is charged
// after warmup; the policy selects at most M agents; selected transmissions
// succeed with the class success probability; true states then move one
// step and ages advance. `solutions` must hold one BanditSolution per class
// when the policy is MGF.
SimRecord RunSimulation(const SimConfig& config,
                        std::span<const BanditSolution> solutions = {});

// Runs every (policy, replication) pair with seeds config.seed + k, in
// parallel. Records are ordered by policy, then replication.
std::vector<SimRecord> RunReplications(const SimConfig& config,
                                       std::span<const PolicyKind> policies,
                                       std::size_t replications,
                                       std::span<const BanditSolution> solutions);

enum class SweepAxis { kAgents, kChannels, kScale };

std::string_view SweepAxisName(SweepAxis axis);
std::optional<SweepAxis> ParseSweepAxis(std::string_view name);

// Copy of `base` at one sweep value. Agents: N spread evenly over classes.
// Channels: M = value. Scale: member counts and M multiplied by value.
SimConfig ConfigAtSweepPoint(const SimConfig& base, SweepAxis axis, std::size_t value);

struct SweepPoint {
  std::size_t value = 0;
  std::size_t agents = 0;
  std::size_t channels = 0;
  DualResult dual;
  std::vector<SimRecord> records;
};

// Solves the dual at every sweep value, then simulates every policy over
// common seeds.
std::vector<SweepPoint> RunSweep(const SimConfig& base, SweepAxis axis,
                                 std::span<const std::size_t> values,
                                 std::span<const PolicyKind> policies,
                                 std::size_t replications, const DualSettings& dual,
                                 const RviSettings& rvi);

}  // namespace aoi_guard

#endif  // AOI_GUARD_SIM_HPP_
