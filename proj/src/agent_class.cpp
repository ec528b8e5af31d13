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

#include "aoi_guard/agent_class.hpp"

#include <cmath>

#include <fmt/format.h>

namespace aoi_guard {

void AgentClassSpec::Validate() const {
  if (!source) throw ValidationError(fmt::format("class '{}' has no source", name));
  if (safety.state_count() != source->state_count()) {
    throw ShapeError(fmt::format("class '{}': safety map covers {} states, source has {}", name,
                                 safety.state_count(), source->state_count()));
  }
  if (safety.label_count() != loss.label_count()) {
    throw ShapeError(fmt::format("class '{}': safety map has {} labels, loss has {}", name,
                                 safety.label_count(), loss.label_count()));
  }
  if (!(success_prob > 0.0 && success_prob <= 1.0)) {
    throw ValidationError(
        fmt::format("class '{}': success_prob {} outside (0, 1]", name, success_prob));
  }
  if (member_count < 1) {
    throw ValidationError(fmt::format("class '{}': member_count must be at least 1", name));
  }
}

AgentClass PrepareClass(AgentClassSpec spec, std::size_t delta_bound) {
  spec.Validate();
  if (delta_bound > spec.source->delta_bound()) {
    throw RangeError(fmt::format("class '{}': delta_bound {} exceeds source cache bound {}",
                                 spec.name, delta_bound, spec.source->delta_bound()));
  }
  EstimationTables tables = BuildTables(*spec.source, spec.safety, spec.loss, delta_bound);
  return AgentClass{std::move(spec), std::move(tables)};
}

std::size_t TotalAgents(const std::vector<AgentClass>& classes) {
  std::size_t n = 0;
  for (const auto& c : classes) n += c.spec.member_count;
  return n;
}

}  // namespace aoi_guard
