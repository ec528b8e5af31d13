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

#include "aoi_guard/sim.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include <fmt/format.h>

#include "aoi_guard/parallel.hpp"

namespace aoi_guard {

std::size_t WorkerCount() {
  if (const char* env = std::getenv("AOI_GUARD_THREADS")) {
    const long requested = std::strtol(env, nullptr, 10);
    if (requested > 0) return static_cast<std::size_t>(requested);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void SimConfig::Validate() const {
  if (classes.empty()) throw ValidationError("simulation needs at least one agent class");
  for (const auto& c : classes) {
    c.spec.Validate();
    if (c.delta_bound() != delta_bound) {
      throw ShapeError(fmt::format("class '{}' tables reach age {}, config delta_bound is {}",
                                   c.spec.name, c.delta_bound(), delta_bound));
    }
  }
  if (channels < 1) throw ValidationError("channels must be at least 1");
  if (!(slots > warmup)) {
    throw ValidationError(fmt::format("slots ({}) must exceed warmup ({})", slots, warmup));
  }
}

SimRecord RunSimulation(const SimConfig& config, std::span<const BanditSolution> solutions) {
  config.Validate();
  if (config.policy == PolicyKind::kMgf && solutions.size() != config.classes.size()) {
    throw ValidationError(
        fmt::format("mgf needs solved gain tables for {} classes, got {}",
                    config.classes.size(), solutions.size()));
  }
  const std::size_t n = config.agent_count();
  const std::size_t bound = config.delta_bound;
  const std::uint64_t seed = config.seed;

  std::vector<std::size_t> class_of(n);
  std::vector<Rng> motion_rng;
  std::vector<Rng> channel_rng;
  motion_rng.reserve(n);
  channel_rng.reserve(n);
  std::vector<std::size_t> true_state(n);
  std::vector<AgentState> states(n);
  {
    std::size_t a = 0;
    for (std::size_t c = 0; c < config.classes.size(); ++c) {
      const std::vector<double> init = InitialStateLaw(*config.classes[c].spec.source);
      for (std::size_t m = 0; m < config.classes[c].spec.member_count; ++m, ++a) {
        class_of[a] = c;
        motion_rng.push_back(Rng::Derive(seed, StreamPurpose::kMotion, a));
        channel_rng.push_back(Rng::Derive(seed, StreamPurpose::kChannel, a));
        Rng init_rng = Rng::Derive(seed, StreamPurpose::kInitial, a);
        true_state[a] = init_rng.Categorical(init);
        states[a] = AgentState{a, c, 1, true_state[a], 1};
      }
    }
  }
  Rng policy_rng = Rng::Derive(seed, StreamPurpose::kPolicy, 0);
  std::unique_ptr<Policy> policy = MakePolicy(
      config.policy, n, std::vector<BanditSolution>(solutions.begin(), solutions.end()));

  double total_loss = 0.0;
  std::uint64_t activations = 0;
  std::uint64_t deliveries = 0;
  std::vector<double> age_sum(n, 0.0);
  std::vector<char> selected(n, 0);
  std::vector<double> channel_draw(n);
  std::vector<char> delivered(n, 0);
  std::vector<Packet> received(n);

  for (std::uint64_t t = 0; t < config.slots; ++t) {
    const bool counted = t >= config.warmup;
    policy->BeginSlot(t, true_state);

    if (counted) {
      for (std::size_t a = 0; a < n; ++a) {
        const AgentClass& cls = config.classes[class_of[a]];
        const std::size_t estimate = cls.tables.estimator(states[a].delta, states[a].x);
        total_loss += cls.spec.loss(cls.spec.safety.label(true_state[a]), estimate);
        age_sum[a] += static_cast<double>(states[a].true_age);
      }
    }

    PolicyDecision decision = policy->Select(states, config.channels, policy_rng);
    if (decision.selected.size() > config.channels) {
      throw std::logic_error(fmt::format("policy {} selected {} agents with {} channels",
                                         PolicyName(config.policy),
                                         decision.selected.size(), config.channels));
    }
    std::fill(selected.begin(), selected.end(), 0);
    std::fill(delivered.begin(), delivered.end(), 0);
    for (std::size_t a = 0; a < n; ++a) channel_draw[a] = channel_rng[a].Uniform();
    for (std::size_t id : decision.selected) {
      if (id >= n || selected[id]) {
        throw std::logic_error(fmt::format("policy {} returned invalid or repeated agent {}",
                                           PolicyName(config.policy), id));
      }
      selected[id] = 1;
      const Packet packet = policy->TakePacket(id, t, true_state[id]);
      if (channel_draw[id] < config.classes[class_of[id]].spec.success_prob) {
        delivered[id] = 1;
        received[id] = packet;
      }
    }
    if (counted) activations += decision.selected.size();

    for (std::size_t a = 0; a < n; ++a) {
      true_state[a] =
          config.classes[class_of[a]].spec.source->SampleNext(true_state[a], motion_rng[a]);
      AgentState& s = states[a];
      s.true_age = AdvanceAoi(s.true_age, selected[a] != 0, delivered[a] != 0);
      if (delivered[a]) {
        // A queued update arrives already (t - generated_at) slots stale.
        s.true_age += t - received[a].generated_at;
        s.x = received[a].state;
        if (counted) ++deliveries;
      }
      s.delta = static_cast<std::size_t>(std::min<std::uint64_t>(s.true_age, bound));
    }
  }

  const double measured = static_cast<double>(config.slots - config.warmup);
  SimRecord rec;
  rec.policy = config.policy;
  rec.agents = n;
  rec.channels = config.channels;
  rec.scale = config.scale;
  rec.seed = config.seed;
  rec.slots = config.slots;
  rec.total_loss = total_loss;
  rec.normalized_penalty = total_loss / (measured * static_cast<double>(n));
  rec.activation_rate = static_cast<double>(activations) / measured;
  rec.deliveries = deliveries;
  rec.per_agent_mean_aoi.resize(n);
  double aoi_total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    rec.per_agent_mean_aoi[a] = age_sum[a] / measured;
    aoi_total += rec.per_agent_mean_aoi[a];
  }
  rec.mean_aoi = aoi_total / static_cast<double>(n);
  return rec;
}

std::vector<SimRecord> RunReplications(const SimConfig& config,
                                       std::span<const PolicyKind> policies,
                                       std::size_t replications,
                                       std::span<const BanditSolution> solutions) {
  std::vector<SimRecord> records(policies.size() * replications);
  ParallelFor(records.size(), [&](std::size_t job) {
    SimConfig run = config;
    run.policy = policies[job / replications];
    run.seed = config.seed + job % replications;
    records[job] = RunSimulation(run, solutions);
  });
  return records;
}

std::string_view SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kAgents:
      return "agents";
    case SweepAxis::kChannels:
      return "channels";
    case SweepAxis::kScale:
      return "scale";
  }
  return "unknown";
}

std::optional<SweepAxis> ParseSweepAxis(std::string_view name) {
  for (SweepAxis axis : {SweepAxis::kAgents, SweepAxis::kChannels, SweepAxis::kScale}) {
    if (SweepAxisName(axis) == name) return axis;
  }
  return std::nullopt;
}

SimConfig ConfigAtSweepPoint(const SimConfig& base, SweepAxis axis, std::size_t value) {
  if (value < 1) throw ValidationError("sweep values must be positive");
  SimConfig out = base;
  const std::size_t k = out.classes.size();
  switch (axis) {
    case SweepAxis::kAgents:
      if (value < k) {
        throw ValidationError(
            fmt::format("agent count {} cannot cover {} classes", value, k));
      }
      for (std::size_t c = 0; c < k; ++c) {
        out.classes[c].spec.member_count = value / k + (c < value % k ? 1 : 0);
      }
      break;
    case SweepAxis::kChannels:
      out.channels = value;
      break;
    case SweepAxis::kScale:
      for (auto& c : out.classes) c.spec.member_count *= value;
      out.channels *= value;
      out.scale = static_cast<double>(value);
      break;
  }
  return out;
}

std::vector<SweepPoint> RunSweep(const SimConfig& base, SweepAxis axis,
                                 std::span<const std::size_t> values,
                                 std::span<const PolicyKind> policies,
                                 std::size_t replications, const DualSettings& dual,
                                 const RviSettings& rvi) {
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (std::size_t value : values) {
    SimConfig config = ConfigAtSweepPoint(base, axis, value);
    SweepPoint point;
    point.value = value;
    point.agents = config.agent_count();
    point.channels = config.channels;
    point.dual = DualAscent(config.classes, config.channels, dual, rvi, base.seed);
    point.records = RunReplications(config, policies, replications, point.dual.solutions);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace aoi_guard
