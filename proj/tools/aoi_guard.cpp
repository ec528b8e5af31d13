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

// Command-line front end: solve | simulate | sweep | profile.
//
// Exit status: 0 success, 2 config parse error, 3 validation error,
// 4 convergence or numeric failure, 5 I/O error, 64 bad command line,
// 1 anything else.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "aoi_guard/config.hpp"
#include "aoi_guard/report.hpp"

namespace {

using namespace aoi_guard;

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kParse = 2,
  kValidation = 3,
  kConvergence = 4,
  kIo = 5,
  kUsage = 64,
};

struct Options {
  std::string config;
  std::string output;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> slots;
  std::optional<std::string> policy;
  std::vector<std::size_t> deltas;
};

RunManifest Prepare(const Options& opt, const std::string& command) {
  RunManifest m = LoadConfig(opt.config);
  m.command = command;
  m.output_path = opt.output;
  m.format = opt.format == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
  if (opt.seed) m.sim.seed = *opt.seed;
  if (opt.slots) {
    m.sim.slots = *opt.slots;
    m.sim.warmup = *opt.slots / 10;
  }
  if (opt.policy) {
    if (*opt.policy == "all") {
      m.policies.assign(kAllPolicies.begin(), kAllPolicies.end());
    } else if (auto kind = ParsePolicy(*opt.policy)) {
      m.policies = {*kind};
    } else {
      throw ValidationError(fmt::format("--policy '{}': expected one of: {} | all", *opt.policy,
                                        PolicyNameList()));
    }
    m.sim.policy = m.policies.front();
  }
  m.sim.Validate();
  return m;
}

Provenance ProvenanceOf(const RunManifest& m) {
  return {std::string(kToolVersion), m.config_digest};
}

void Emit(const RunManifest& m, const std::string& contents) {
  if (m.output_path.empty() || m.output_path == "-") {
    std::fwrite(contents.data(), 1, contents.size(), stdout);
  } else {
    WriteFile(m.output_path, contents);
  }
}

// Summaries go to stderr when the records themselves go to stdout.
std::FILE* SummaryStream(const RunManifest& m) {
  return m.output_path.empty() || m.output_path == "-" ? stderr : stdout;
}

void PrintPolicySummaries(const RunManifest& m, std::span<const SimRecord> records,
                          std::string_view prefix) {
  for (PolicyKind kind : m.policies) {
    double sum = 0.0, sum_sq = 0.0, aoi = 0.0;
    std::size_t count = 0;
    for (const SimRecord& r : records) {
      if (r.policy != kind) continue;
      sum += r.normalized_penalty;
      sum_sq += r.normalized_penalty * r.normalized_penalty;
      aoi += r.mean_aoi;
      ++count;
    }
    if (count == 0) continue;
    const double mean = sum / count;
    const double var = count > 1 ? (sum_sq - count * mean * mean) / (count - 1) : 0.0;
    fmt::print(SummaryStream(m), "{}{:<13} penalty {:.6f} +- {:.6f} (se, {} runs)  mean_aoi {:.3f}\n",
               prefix, PolicyName(kind), mean, std::sqrt(std::max(var, 0.0) / count), count,
               aoi / count);
  }
}

int Solve(const Options& opt) {
  RunManifest m = Prepare(opt, "solve");
  const std::string dir = m.output_path.empty() ? "solve_out" : m.output_path;
  const DualResult dual = DualAscent(m.sim.classes, m.sim.channels, m.dual, m.rvi, m.sim.seed);
  const Provenance prov = ProvenanceOf(m);
  for (std::size_t c = 0; c < m.sim.classes.size(); ++c) {
    WriteFile(std::filesystem::path(dir) / fmt::format("tables_{}.csv", m.sim.classes[c].spec.name),
              TablesCsv(m.sim.classes[c], dual.solutions[c], prov));
  }
  WriteFile(std::filesystem::path(dir) / "dual_trace.csv", TraceCsv(dual.trace, prov));
  WriteFile(std::filesystem::path(dir) / "summary.json",
            SolveSummaryJson(m.sim.classes, dual, prov));
  fmt::print("lambda_star {} activation_rate {} (M = {}){}  dual_value {}\n", dual.lambda_star,
             dual.activation_rate, m.sim.channels,
             dual.rate_in_band ? "" : "  WARNING: rate outside band, best iterate kept",
             dual.dual_value);
  return kOk;
}

int Simulate(const Options& opt) {
  RunManifest m = Prepare(opt, "simulate");
  std::vector<BanditSolution> solutions;
  for (PolicyKind kind : m.policies) {
    if (kind == PolicyKind::kMgf) {
      DualResult dual = DualAscent(m.sim.classes, m.sim.channels, m.dual, m.rvi, m.sim.seed);
      fmt::print(SummaryStream(m), "lambda_star {}{}\n", dual.lambda_star,
                 dual.rate_in_band ? "" : " (WARNING: relaxed rate outside band)");
      solutions = std::move(dual.solutions);
    }
  }
  const auto records = RunReplications(m.sim, m.policies, m.replications, solutions);
  const Provenance prov = ProvenanceOf(m);
  Emit(m, m.format == OutputFormat::kJson ? RecordsJson(records, prov) : RecordsCsv(records, prov));
  PrintPolicySummaries(m, records, "");
  return kOk;
}

int Sweep(const Options& opt) {
  RunManifest m = Prepare(opt, "sweep");
  if (!m.sweep) throw ValidationError(fmt::format("{}: 'sweep': section required", m.config_path));
  const auto points = RunSweep(m.sim, m.sweep->axis, m.sweep->values, m.policies,
                               m.replications, m.dual, m.rvi);
  std::vector<SimRecord> records;
  for (const SweepPoint& p : points) {
    records.insert(records.end(), p.records.begin(), p.records.end());
  }
  const Provenance prov = ProvenanceOf(m);
  Emit(m, m.format == OutputFormat::kJson ? RecordsJson(records, prov) : RecordsCsv(records, prov));
  for (const SweepPoint& p : points) {
    fmt::print(SummaryStream(m), "{}={} N={} M={} lambda_star={} lower_bound_per_agent={}\n",
               SweepAxisName(m.sweep->axis), p.value, p.agents, p.channels, p.dual.lambda_star,
               p.dual.dual_value / static_cast<double>(p.agents));
    PrintPolicySummaries(m, p.records, "  ");
  }
  return kOk;
}

int Profile(const Options& opt) {
  RunManifest m = Prepare(opt, "profile");
  std::vector<std::size_t> deltas = opt.deltas;
  if (deltas.empty()) deltas = m.profile_deltas;
  if (deltas.empty()) deltas = {1, 5, 10};
  for (std::size_t d : deltas) {
    if (d < 1 || d > m.sim.delta_bound) {
      throw ValidationError(fmt::format("--deltas: age {} outside [1, {}]", d, m.sim.delta_bound));
    }
  }
  const DualResult dual = DualAscent(m.sim.classes, m.sim.channels, m.dual, m.rvi, m.sim.seed);
  Emit(m, ProfileCsv(m.sim.classes, dual.solutions, deltas, ProvenanceOf(m)));
  for (const ProfileSummary& s : SummarizeProfiles(m.sim.classes, dual.solutions, deltas)) {
    fmt::print(SummaryStream(m),
               "class={} delta={} argmax_q={} argmax_alpha={} max_q={} high_q_set={}\n",
               m.sim.classes[s.class_id].spec.name, s.delta, s.argmax_penalty, s.argmax_gain,
               s.max_penalty, fmt::join(s.high_penalty_set, " "));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Significance-aware status update scheduling for remote safety monitoring"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Options opt;
  auto add_shared = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Run manifest (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", opt.output, "Output path ('-' or empty for stdout)");
    sub->add_option("--format", opt.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", opt.seed, "Master seed override");
    sub->add_option("--slots", opt.slots, "Simulated slots override (warmup becomes 10%)");
    sub->add_option("--policy", opt.policy, "mgf | randomized | random_queue | maf | all")
        ->check(CLI::IsMember({"mgf", "randomized", "random_queue", "maf", "all"}));
  };
  CLI::App* solve = app.add_subcommand("solve", "Build tables, run dual ascent, write artifacts");
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate the configured policies");
  CLI::App* sweep = app.add_subcommand("sweep", "Simulate over the configured sweep axis");
  CLI::App* profile = app.add_subcommand("profile", "Penalty and gain profiles per age");
  for (CLI::App* sub : {solve, simulate, sweep, profile}) add_shared(sub);
  profile->add_option("--deltas", opt.deltas, "Ages to profile")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return Solve(opt);
    if (*simulate) return Simulate(opt);
    if (*sweep) return Sweep(opt);
    if (*profile) return Profile(opt);
  } catch (const ParseError& e) {
    fmt::print(stderr, "parse error: {}\n", e.what());
    return kParse;
  } catch (const ConvergenceError& e) {
    fmt::print(stderr, "convergence error: {}\n", e.what());
    return kConvergence;
  } catch (const NumericError& e) {
    fmt::print(stderr, "numeric error: {}\n", e.what());
    return kConvergence;
  } catch (const IoError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kIo;
  } catch (const Error& e) {
    fmt::print(stderr, "validation error: {}\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kOther;
  }
  return kOther;
}
