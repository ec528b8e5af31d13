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

#ifndef AOI_GUARD_REPORT_HPP_
#define AOI_GUARD_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aoi_guard/bandit.hpp"
#include "aoi_guard/sim.hpp"

namespace aoi_guard {

// Stamped into every output: CSV files start with two '#' comment lines,
// JSON documents carry the same two fields.
struct Provenance {
  std::string tool_version;
  std::string config_digest;
};

inline constexpr std::string_view kRecordCsvHeader =
    "policy,N,M,r,seed,slots,total_loss,normalized_penalty,activation_rate,mean_aoi";

std::string RecordsCsv(std::span<const SimRecord> records, const Provenance& prov);
std::string RecordsJson(std::span<const SimRecord> records, const Provenance& prov);

// delta,x,q,f,alpha for every table entry.
std::string TablesCsv(const AgentClass& cls, const BanditSolution& solution,
                      const Provenance& prov);
// iteration,lambda,activation_rate
std::string TraceCsv(const DualTrace& trace, const Provenance& prov);
std::string SolveSummaryJson(const std::vector<AgentClass>& classes, const DualResult& dual,
                             const Provenance& prov);

struct ProfileSummary {
  std::size_t class_id = 0;
  std::size_t delta = 1;
  std::size_t argmax_penalty = 0;
  std::size_t argmax_gain = 0;
  double max_penalty = 0.0;
  // Observations with q(delta, x) > 0.5 * max_x q(delta, x).
  std::vector<std::size_t> high_penalty_set;
};

std::vector<ProfileSummary> SummarizeProfiles(const std::vector<AgentClass>& classes,
                                              const std::vector<BanditSolution>& solutions,
                                              std::span<const std::size_t> deltas);

// class,delta,x,q,alpha
std::string ProfileCsv(const std::vector<AgentClass>& classes,
                       const std::vector<BanditSolution>& solutions,
                       std::span<const std::size_t> deltas, const Provenance& prov);

// Drops leading '#' comment lines.
std::string CsvBody(const std::string& csv);

void WriteFile(const std::filesystem::path& path, const std::string& contents);

}  // namespace aoi_guard

#endif  // AOI_GUARD_REPORT_HPP_
