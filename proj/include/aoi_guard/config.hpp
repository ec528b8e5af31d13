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

#ifndef AOI_GUARD_CONFIG_HPP_
#define AOI_GUARD_CONFIG_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoi_guard/bandit.hpp"
#include "aoi_guard/sim.hpp"

namespace aoi_guard {

inline constexpr std::string_view kToolVersion = "aoi_guard 0.1.0";

enum class OutputFormat { kCsv, kJson };

struct SweepSettings {
  SweepAxis axis = SweepAxis::kAgents;
  std::vector<std::size_t> values;
};

// Everything a command needs, validated. `sim.policy` is the first entry of
// `policies`.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_digest;  // SHA-256 of the config file bytes, hex
  std::string name;
  SimConfig sim;
  std::vector<PolicyKind> policies;
  std::size_t replications = 1;
  RviSettings rvi;
  DualSettings dual;
  std::optional<SweepSettings> sweep;
  std::vector<std::size_t> profile_deltas;
  std::string output_path;
  OutputFormat format = OutputFormat::kCsv;
};

std::string Sha256Hex(std::string_view bytes);

// Parses a YAML manifest. `origin` prefixes error locations. Parse failures
// raise ParseError; semantic failures raise ValidationError naming the key.
RunManifest ParseConfig(std::string_view text, std::string_view origin);

// Reads and parses a file; IoError when it cannot be read.
RunManifest LoadConfig(const std::filesystem::path& path);

}  // namespace aoi_guard

#endif  // AOI_GUARD_CONFIG_HPP_
