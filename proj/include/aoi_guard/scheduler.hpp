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

#ifndef AOI_GUARD_SCHEDULER_HPP_
#define AOI_GUARD_SCHEDULER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aoi_guard/bandit.hpp"
#include "aoi_guard/rng.hpp"

namespace aoi_guard {

// Receiver-side view of one agent: age of the freshest delivered update and
// the observation it carried. `delta` is clamped to the table bound for
// lookups, `true_age` is not.
struct AgentState {
  std::size_t id = 0;
  std::size_t class_id = 0;
  std::size_t delta = 1;
  std::size_t x = 0;
  std::uint64_t true_age = 1;
};

struct PolicyDecision {
  std::vector<std::size_t> selected;
};

enum class PolicyKind { kMgf, kRandomized, kRandomQueue, kMaf };

inline constexpr std::array<PolicyKind, 4> kAllPolicies = {
    PolicyKind::kMgf, PolicyKind::kMaf, PolicyKind::kRandomized, PolicyKind::kRandomQueue};

std::string_view PolicyName(PolicyKind kind);
std::optional<PolicyKind> ParsePolicy(std::string_view name);
// "mgf | randomized | random_queue | maf"
std::string_view PolicyNameList();

// Maximum Gain First: up to M agents with the largest strictly positive
// gain alpha(delta, x), ties to the lower id.
PolicyDecision MgfSelect(std::span<const AgentState> states,
                         std::span<const BanditSolution> solutions, std::size_t channels);

// Uniform M-subset without replacement (partial Fisher-Yates), in draw order.
PolicyDecision RandomizedSelect(std::span<const std::size_t> ids, std::size_t channels,
                                Rng& rng);

// Maximum Age First: the M largest true ages, ties to the lower id.
PolicyDecision MafSelect(std::span<const AgentState> states, std::size_t channels);

struct Packet {
  std::uint64_t generated_at = 0;
  std::size_t state = 0;
};

// Per-agent FIFO of generated updates. When full the oldest is dropped.
class UpdateQueue {
 public:
  static constexpr std::size_t kCapacity = 1000;

  explicit UpdateQueue(std::size_t capacity = kCapacity) : capacity_(capacity) {}

  void Push(const Packet& packet);
  std::optional<Packet> PopOldest();

  std::size_t size() const { return packets_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Packet>& packets() const { return packets_; }

 private:
  std::size_t capacity_;
  std::deque<Packet> packets_;
};

struct QueueStep {
  PolicyDecision decision;
  std::vector<Packet> sent;  // sent[i] belongs to decision.selected[i]
};

// One slot of random selection with queues: every agent enqueues the update
// generated now, M agents are drawn uniformly and each dequeues its oldest
// update for transmission.
QueueStep QueuePolicyStep(std::span<UpdateQueue> queues, std::span<const std::size_t> ids,
                          std::span<const std::size_t> current_states, std::uint64_t slot,
                          std::size_t channels, Rng& rng);

// Interface consumed by the simulator. A policy instance belongs to exactly
// one replication.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyKind kind() const = 0;

  // Sees the true states at the start of a slot, before selection.
  virtual void BeginSlot(std::uint64_t /*slot*/, std::span<const std::size_t> /*true_states*/) {}

  virtual PolicyDecision Select(std::span<const AgentState> states, std::size_t channels,
                                Rng& rng) = 0;

  // The update a selected agent transmits. Default: a fresh sample.
  virtual Packet TakePacket(std::size_t /*agent*/, std::uint64_t slot, std::size_t true_state) {
    return {slot, true_state};
  }
};

// `solutions` (one per class, at the optimal price) is required for MGF and
// ignored otherwise.
std::unique_ptr<Policy> MakePolicy(PolicyKind kind, std::size_t agent_count,
                                   std::vector<BanditSolution> solutions = {});

}  // namespace aoi_guard

#endif  // AOI_GUARD_SCHEDULER_HPP_
