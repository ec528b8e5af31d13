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

#include "aoi_guard/scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include <fmt/format.h>

namespace aoi_guard {

std::string_view PolicyName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kMgf:
      return "mgf";
    case PolicyKind::kRandomized:
      return "randomized";
    case PolicyKind::kRandomQueue:
      return "random_queue";
    case PolicyKind::kMaf:
      return "maf";
  }
  return "unknown";
}

std::optional<PolicyKind> ParsePolicy(std::string_view name) {
  for (PolicyKind kind : kAllPolicies) {
    if (PolicyName(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string_view PolicyNameList() { return "mgf | randomized | random_queue | maf"; }

PolicyDecision MgfSelect(std::span<const AgentState> states,
                         std::span<const BanditSolution> solutions, std::size_t channels) {
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(states.size());
  for (const AgentState& s : states) {
    if (s.class_id >= solutions.size()) {
      throw RangeError(fmt::format("agent {} has class {} but only {} solutions", s.id,
                                   s.class_id, solutions.size()));
    }
    const double gain = solutions[s.class_id].gain.at(s.delta, s.x);
    if (gain > 0.0) ranked.emplace_back(gain, s.id);
  }
  const std::size_t take = std::min(channels, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  PolicyDecision out;
  out.selected.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.selected.push_back(ranked[i].second);
  return out;
}

PolicyDecision RandomizedSelect(std::span<const std::size_t> ids, std::size_t channels,
                                Rng& rng) {
  std::vector<std::size_t> pool(ids.begin(), ids.end());
  const std::size_t take = std::min(channels, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.Below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return PolicyDecision{std::move(pool)};
}

PolicyDecision MafSelect(std::span<const AgentState> states, std::size_t channels) {
  std::vector<std::pair<std::uint64_t, std::size_t>> ranked;
  ranked.reserve(states.size());
  for (const AgentState& s : states) ranked.emplace_back(s.true_age, s.id);
  const std::size_t take = std::min(channels, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  PolicyDecision out;
  for (std::size_t i = 0; i < take; ++i) out.selected.push_back(ranked[i].second);
  return out;
}

void UpdateQueue::Push(const Packet& packet) {
  if (!packets_.empty() && packet.generated_at <= packets_.back().generated_at) {
    throw ValidationError(fmt::format("update stamped {} is not newer than queued stamp {}",
                                      packet.generated_at, packets_.back().generated_at));
  }
  if (packets_.size() == capacity_) packets_.pop_front();
  packets_.push_back(packet);
}

std::optional<Packet> UpdateQueue::PopOldest() {
  if (packets_.empty()) return std::nullopt;
  Packet front = packets_.front();
  packets_.pop_front();
  return front;
}

QueueStep QueuePolicyStep(std::span<UpdateQueue> queues, std::span<const std::size_t> ids,
                          std::span<const std::size_t> current_states, std::uint64_t slot,
                          std::size_t channels, Rng& rng) {
  if (queues.size() != current_states.size()) {
    throw ShapeError("need one queue and one current state per agent");
  }
  for (std::size_t a = 0; a < queues.size(); ++a) queues[a].Push({slot, current_states[a]});
  QueueStep step{RandomizedSelect(ids, channels, rng), {}};
  for (std::size_t id : step.decision.selected) {
    if (id >= queues.size()) throw RangeError(fmt::format("agent {} has no queue", id));
  }
  step.sent.reserve(step.decision.selected.size());
  for (std::size_t id : step.decision.selected) {
    // Never empty: the agent enqueued an update this slot.
    step.sent.push_back(*queues[id].PopOldest());
  }
  return step;
}

namespace {

std::vector<std::size_t> Iota(std::size_t n) {
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return ids;
}

class MgfPolicy final : public Policy {
 public:
  explicit MgfPolicy(std::vector<BanditSolution> solutions) : solutions_(std::move(solutions)) {}
  PolicyKind kind() const override { return PolicyKind::kMgf; }
  PolicyDecision Select(std::span<const AgentState> states, std::size_t channels,
                        Rng&) override {
    return MgfSelect(states, solutions_, channels);
  }

 private:
  std::vector<BanditSolution> solutions_;
};

class RandomizedPolicy final : public Policy {
 public:
  explicit RandomizedPolicy(std::size_t n) : ids_(Iota(n)) {}
  PolicyKind kind() const override { return PolicyKind::kRandomized; }
  PolicyDecision Select(std::span<const AgentState>, std::size_t channels, Rng& rng) override {
    return RandomizedSelect(ids_, channels, rng);
  }

 private:
  std::vector<std::size_t> ids_;
};

class MafPolicy final : public Policy {
 public:
  PolicyKind kind() const override { return PolicyKind::kMaf; }
  PolicyDecision Select(std::span<const AgentState> states, std::size_t channels,
                        Rng&) override {
    return MafSelect(states, channels);
  }
};

class RandomQueuePolicy final : public Policy {
 public:
  explicit RandomQueuePolicy(std::size_t n) : ids_(Iota(n)), queues_(n), pending_(n) {}
  PolicyKind kind() const override { return PolicyKind::kRandomQueue; }

  void BeginSlot(std::uint64_t slot, std::span<const std::size_t> true_states) override {
    slot_ = slot;
    states_.assign(true_states.begin(), true_states.end());
  }

  PolicyDecision Select(std::span<const AgentState>, std::size_t channels, Rng& rng) override {
    QueueStep step = QueuePolicyStep(queues_, ids_, states_, slot_, channels, rng);
    for (std::size_t i = 0; i < step.decision.selected.size(); ++i) {
      pending_[step.decision.selected[i]] = step.sent[i];
    }
    return std::move(step.decision);
  }

  Packet TakePacket(std::size_t agent, std::uint64_t, std::size_t) override {
    return pending_.at(agent);
  }

 private:
  std::vector<std::size_t> ids_;
  std::vector<UpdateQueue> queues_;
  std::vector<Packet> pending_;
  std::vector<std::size_t> states_;
  std::uint64_t slot_ = 0;
};

}  // namespace

std::unique_ptr<Policy> MakePolicy(PolicyKind kind, std::size_t agent_count,
                                   std::vector<BanditSolution> solutions) {
  switch (kind) {
    case PolicyKind::kMgf:
      if (solutions.empty()) {
        throw ValidationError("the mgf policy needs solved gain tables");
      }
      return std::make_unique<MgfPolicy>(std::move(solutions));
    case PolicyKind::kRandomized:
      return std::make_unique<RandomizedPolicy>(agent_count);
    case PolicyKind::kRandomQueue:
      return std::make_unique<RandomQueuePolicy>(agent_count);
    case PolicyKind::kMaf:
      return std::make_unique<MafPolicy>();
  }
  throw ValidationError("unknown policy");
}

}  // namespace aoi_guard
