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

#ifndef AOI_GUARD_AGENT_CLASS_HPP_
#define AOI_GUARD_AGENT_CLASS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "aoi_guard/loss.hpp"
#include "aoi_guard/markov.hpp"

namespace aoi_guard {

// Agents that share a source model, safety labelling, loss and channel
// success probability.
struct AgentClassSpec {
  std::string name;
  SourcePtr source;
  SafetyMap safety;
  LossMatrix loss;
  double success_prob = 1.0;
  std::size_t member_count = 1;

  // Throws ValidationError or ShapeError on inconsistent parts.
  void Validate() const;
};

// A class together with its estimation tables, built once per run.
struct AgentClass {
  AgentClassSpec spec;
  EstimationTables tables;

  std::size_t delta_bound() const { return tables.penalty.delta_bound(); }
};

AgentClass PrepareClass(AgentClassSpec spec, std::size_t delta_bound);

std::size_t TotalAgents(const std::vector<AgentClass>& classes);

}  // namespace aoi_guard

#endif  // AOI_GUARD_AGENT_CLASS_HPP_
