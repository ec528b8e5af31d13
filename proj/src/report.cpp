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

#include "aoi_guard/report.hpp"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

namespace aoi_guard {

namespace {

std::string CsvPreamble(const Provenance& prov) {
  return fmt::format("# {}\n# config_sha256 {}\n", prov.tool_version, prov.config_digest);
}

nlohmann::ordered_json JsonPreamble(const Provenance& prov) {
  nlohmann::ordered_json doc;
  doc["tool_version"] = prov.tool_version;
  doc["config_sha256"] = prov.config_digest;
  return doc;
}

}  // namespace

std::string RecordsCsv(std::span<const SimRecord> records, const Provenance& prov) {
  std::string out = CsvPreamble(prov);
  out += kRecordCsvHeader;
  out += '\n';
  for (const SimRecord& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", PolicyName(r.policy), r.agents,
                       r.channels, r.scale, r.seed, r.slots, r.total_loss, r.normalized_penalty,
                       r.activation_rate, r.mean_aoi);
  }
  return out;
}

std::string RecordsJson(std::span<const SimRecord> records, const Provenance& prov) {
  nlohmann::ordered_json doc = JsonPreamble(prov);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const SimRecord& r : records) {
    rows.push_back({{"policy", PolicyName(r.policy)},
                    {"N", r.agents},
                    {"M", r.channels},
                    {"r", r.scale},
                    {"seed", r.seed},
                    {"slots", r.slots},
                    {"total_loss", r.total_loss},
                    {"normalized_penalty", r.normalized_penalty},
                    {"activation_rate", r.activation_rate},
                    {"mean_aoi", r.mean_aoi}});
  }
  doc["records"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string TablesCsv(const AgentClass& cls, const BanditSolution& solution,
                      const Provenance& prov) {
  std::string out = CsvPreamble(prov);
  out += "delta,x,q,f,alpha\n";
  const auto& q = cls.tables.penalty;
  for (std::size_t d = 1; d <= q.delta_bound(); ++d) {
    for (std::size_t x = 0; x < q.state_count(); ++x) {
      out += fmt::format("{},{},{},{},{}\n", d, x, q(d, x), cls.tables.estimator(d, x),
                         solution.gain.at(d, x));
    }
  }
  return out;
}

std::string TraceCsv(const DualTrace& trace, const Provenance& prov) {
  std::string out = CsvPreamble(prov);
  out += "iteration,lambda,activation_rate\n";
  for (const DualStep& s : trace.steps) {
    out += fmt::format("{},{},{}\n", s.iteration, s.lambda, s.activation_rate);
  }
  return out;
}

std::string SolveSummaryJson(const std::vector<AgentClass>& classes, const DualResult& dual,
                             const Provenance& prov) {
  nlohmann::ordered_json doc = JsonPreamble(prov);
  doc["lambda_star"] = dual.lambda_star;
  nlohmann::ordered_json costs = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    costs[classes[c].spec.name] = dual.solutions[c].avg_cost;
  }
  doc["avg_costs"] = std::move(costs);
  doc["activation_rate"] = dual.activation_rate;
  doc["rate_in_band"] = dual.rate_in_band;
  doc["dual_value"] = dual.dual_value;
  return doc.dump(2) + "\n";
}

std::vector<ProfileSummary> SummarizeProfiles(const std::vector<AgentClass>& classes,
                                              const std::vector<BanditSolution>& solutions,
                                              std::span<const std::size_t> deltas) {
  std::vector<ProfileSummary> out;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& q = classes[c].tables.penalty;
    const auto& gain = solutions.at(c).gain;
    for (std::size_t d : deltas) {
      ProfileSummary s;
      s.class_id = c;
      s.delta = d;
      s.max_penalty = q.at(d, 0);
      double max_gain = gain.at(d, 0);
      for (std::size_t x = 1; x < q.state_count(); ++x) {
        if (q(d, x) > s.max_penalty) {
          s.max_penalty = q(d, x);
          s.argmax_penalty = x;
        }
        if (gain(d, x) > max_gain) {
          max_gain = gain(d, x);
          s.argmax_gain = x;
        }
      }
      for (std::size_t x = 0; x < q.state_count(); ++x) {
        if (q(d, x) > 0.5 * s.max_penalty) s.high_penalty_set.push_back(x);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::string ProfileCsv(const std::vector<AgentClass>& classes,
                       const std::vector<BanditSolution>& solutions,
                       std::span<const std::size_t> deltas, const Provenance& prov) {
  std::string out = CsvPreamble(prov);
  out += "class,delta,x,q,alpha\n";
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& q = classes[c].tables.penalty;
    for (std::size_t d : deltas) {
      for (std::size_t x = 0; x < q.state_count(); ++x) {
        out += fmt::format("{},{},{},{},{}\n", classes[c].spec.name, d, x, q.at(d, x),
                           solutions.at(c).gain.at(d, x));
      }
    }
  }
  return out;
}

std::string CsvBody(const std::string& csv) {
  std::size_t pos = 0;
  while (pos < csv.size() && csv[pos] == '#') {
    const std::size_t eol = csv.find('\n', pos);
    if (eol == std::string::npos) return {};
    pos = eol + 1;
  }
  return csv.substr(pos);
}

void WriteFile(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError(fmt::format("cannot create directory '{}': {}",
                                path.parent_path().string(), ec.message()));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out << contents;
  out.flush();
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace aoi_guard
