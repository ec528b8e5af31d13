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

// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "aoi_guard/agent_class.hpp"
#include "aoi_guard/bandit.hpp"
#include "aoi_guard/config.hpp"
#include "aoi_guard/loss.hpp"
#include "aoi_guard/markov.hpp"
#include "aoi_guard/report.hpp"
#include "aoi_guard/sim.hpp"
#include "test_support.hpp"

namespace aoi_guard {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const std::string kConfigDir = AOI_GUARD_CONFIG_DIR;
const std::string kCli = AOI_GUARD_CLI_PATH;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe Summarize(const std::vector<double>& v) {
  MeanSe out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.se = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) /
                                    static_cast<double>(v.size()))
                        : 0.0;
  return out;
}

// Normalized penalties of one policy, ordered by seed.
std::vector<double> Penalties(const std::vector<SimRecord>& recs, PolicyKind kind) {
  std::vector<const SimRecord*> mine;
  for (const auto& r : recs) {
    if (r.policy == kind) mine.push_back(&r);
  }
  std::sort(mine.begin(), mine.end(), [](auto* a, auto* b) { return a->seed < b->seed; });
  std::vector<double> out;
  for (auto* r : mine) out.push_back(r->normalized_penalty);
  return out;
}

std::vector<double> Difference(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

AgentClass MakeClass(const DenseMatrix& p, SafetyMap safety, LossMatrix loss, double success,
                     std::size_t bound) {
  AgentClassSpec spec{"c", std::make_shared<const MarkovSource>(p, bound), std::move(safety),
                      std::move(loss), success, 1};
  return PrepareClass(std::move(spec), bound);
}

const DenseMatrix kChainA(2, 2, {0.9, 0.1, 0.2, 0.8});

// 1
Outcome EstimatorOracle() {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::size_t> states(1, 6), labels(1, 4);
  std::size_t mismatches = 0, entries = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = states(gen), k = labels(gen);
    auto p = trial % 2 == 0 ? testing::RandomSparseMatrix(n, gen)
                            : testing::RandomErgodicMatrix(n, gen);
    auto safety = testing::RandomSafety(n, k, gen);
    auto loss = testing::RandomLoss(k, gen);
    MarkovSource src(p, 10);
    auto t = BuildTables(src, safety, loss, 10);
    for (std::size_t d = 1; d <= 10; ++d) {
      for (std::size_t x = 0; x < n; ++x) {
        auto ref = testing::BruteForceEntry(p, safety, loss, x, d);
        const double diff = std::abs(t.penalty(d, x) - ref.penalty);
        worst = std::max(worst, diff);
        if (diff > 1e-12 || t.estimator(d, x) != ref.estimate) ++mismatches;
        ++entries;
      }
    }
  }
  return {mismatches == 0,
          fmt::format("{} entries, {} mismatches, max |dq| {:.2e}", entries, mismatches, worst)};
}

// 2
Outcome ConditioningReducesEntropy() {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<std::size_t> size(1, 5);
  std::size_t violations = 0, checks = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nx = size(gen), ny = size(gen), nz = size(gen);
    auto joint = testing::RandomSimplex(nx * ny * nz, gen);
    auto loss = testing::RandomLoss(ny, gen);
    for (std::size_t z = 0; z < nz; ++z) {
      double pz = 0.0;
      std::vector<double> px(nx, 0.0);
      for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y) px[x] += joint[(x * ny + y) * nz + z];
        pz += px[x];
      }
      if (pz <= 0.0) continue;
      ConditionalLaws laws;
      for (std::size_t x = 0; x < nx; ++x) {
        laws.x_given_z.push_back(px[x] / pz);
        std::vector<double> py(ny, 1.0 / static_cast<double>(ny));
        if (px[x] > 0.0) {
          for (std::size_t y = 0; y < ny; ++y) py[y] = joint[(x * ny + y) * nz + z] / px[x];
        }
        laws.y_given_xz.push_back(py);
      }
      auto e = ConditionalEntropyGiven(laws, loss);
      worst = std::max(worst, e.with_side_info - e.without_side_info);
      if (e.without_side_info < e.with_side_info - 1e-12) ++violations;
      ++checks;
    }
  }
  return {violations == 0, fmt::format("{} conditionals, {} violations, max excess {:.2e}", checks,
                                       violations, worst)};
}

// 3
Outcome AveragedDataProcessing() {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  std::size_t violations = 0;
  double worst_drop = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = size(gen);
    MarkovSource src(testing::RandomErgodicMatrix(n, gen), 100);
    const bool example = trial % 2 == 0;
    const std::size_t k = example ? 3 : 2 + trial % 3;
    auto safety = testing::RandomSafety(n, k, gen);
    auto loss = example ? SafetyExampleLoss() : testing::RandomLoss(k, gen);
    auto t = BuildTables(src, safety, loss, 100);
    auto pi = StationaryDistribution(src);
    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t d = 1; d <= 100; ++d) {
      double avg = 0.0;
      for (std::size_t x = 0; x < n; ++x) avg += pi[x] * t.penalty(d, x);
      if (avg < previous - 1e-10) ++violations;
      worst_drop = std::max(worst_drop, previous - avg);
      previous = avg;
    }
  }
  return {violations == 0,
          fmt::format("50 chains, {} violations, largest drop {:.2e}", violations, worst_drop)};
}

// 4
Outcome Saturation() {
  MarkovSource a(kChainA, 250);
  auto t = BuildTables(a, SafetyMap::Identity(2), ZeroOneLoss(2), 250);
  double sat = 0.0;
  for (std::size_t x = 0; x < 2; ++x) sat = std::max(sat, std::abs(t.penalty(250, x) - 1.0 / 3.0));

  double shift = 0.0;
  auto compare = [&](const DenseMatrix& p, const SafetyMap& safety, const LossMatrix& loss,
                     double success, double lambda) {
    auto c1 = MakeClass(p, safety, loss, success, 250);
    auto c2 = MakeClass(p, safety, loss, success, 500);
    shift = std::max(shift, std::abs(SolveClass(c1, lambda, {}).avg_cost -
                                     SolveClass(c2, lambda, {}).avg_cost));
  };
  for (double success : {1.0, 0.95, 0.5}) {
    for (double lambda : {0.0, 0.05, 0.5}) {
      compare(kChainA, SafetyMap::Identity(2), ZeroOneLoss(2), success, lambda);
    }
  }
  const std::vector<std::size_t> bands = {6, 7, 7};
  for (double move : {0.3, 0.05}) {
    for (double lambda : {0.0, 3.0}) {
      compare(RowChainMatrix(20, move, move), SafetyMap::Bands(bands), SafetyExampleLoss(), 0.95,
              lambda);
    }
  }
  return {sat < 1e-6 && shift < 1e-6,
          fmt::format("max |q(250,x) - 1/3| {:.2e}, max avg_cost shift at 500 {:.2e}", sat, shift)};
}

// 5
Outcome AlwaysSend() {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  std::uniform_real_distribution<double> success(0.3, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = size(gen);
    auto p = testing::RandomErgodicMatrix(n, gen);
    const double s = success(gen);
    auto zero_one = MakeClass(p, SafetyMap::Identity(n), ZeroOneLoss(n), s, 250);
    auto example = MakeClass(p, testing::RandomSafety(n, 3, gen), SafetyExampleLoss(), s, 250);
    for (const AgentClass* c : {&zero_one, &example}) {
      auto sol = SolveClass(*c, 0.0, {});
      for (double g : sol.gain.values()) worst = std::min(worst, g);
    }
  }
  return {worst >= -1e-9, fmt::format("40 solves, min gain {:.3e}", worst)};
}

// 6
Outcome ClosedForm() {
  SimConfig cfg;
  cfg.classes.push_back(MakeClass(kChainA, SafetyMap::Identity(2), ZeroOneLoss(2), 1.0, 250));
  cfg.channels = 1;
  cfg.slots = 1'000'000;
  cfg.warmup = 100'000;
  std::vector<BanditSolution> sols{SolveClass(cfg.classes[0], 0.0, {})};
  const double avg = sols[0].avg_cost;
  auto rec = RunSimulation(cfg, sols);
  const double rel = std::abs(rec.normalized_penalty - avg) / avg;
  return {std::abs(avg - 0.13333) <= 1e-4 && rel <= 0.02,
          fmt::format("avg_cost {:.6f}, simulated {:.6f} ({:.2f}% apart)", avg,
                      rec.normalized_penalty, 100 * rel)};
}

struct GridRun {
  std::vector<SweepPoint> points;
  std::size_t base_index = 0;  // point with N = 20
  std::vector<AgentClass> base_classes;
};

GridRun RunRegionGrid() {
  auto m = LoadConfig(kConfigDir + "/region20.cfg");
  const std::vector<std::size_t> agents = {10, 20, 30, 40};
  GridRun run;
  run.points = RunSweep(m.sim, SweepAxis::kAgents, agents, kAllPolicies, 20, m.dual, m.rvi);
  for (std::size_t i = 0; i < run.points.size(); ++i) {
    if (run.points[i].agents == 20) run.base_index = i;
  }
  run.base_classes = ConfigAtSweepPoint(m.sim, SweepAxis::kAgents, 20).classes;
  return run;
}

// 7
Outcome DualFeasibility(const GridRun& run) {
  const SweepPoint& pt = run.points[run.base_index];
  const double m = static_cast<double>(pt.channels);
  const double bound = pt.dual.dual_value / static_cast<double>(pt.agents);
  bool ok = pt.dual.lambda_star >= 0.0 && std::abs(pt.dual.activation_rate - m) <= 0.05 * m;
  std::string detail = fmt::format("lambda* {:.4f}, relaxed rate {:.4f} (M={}), bound {:.4f};",
                                   pt.dual.lambda_star, pt.dual.activation_rate, pt.channels, bound);
  for (PolicyKind k : kAllPolicies) {
    auto s = Summarize(Penalties(pt.records, k));
    ok = ok && bound <= s.mean - 3 * s.se;
    detail += fmt::format(" {} {:.4f}-3se={:.4f}", PolicyName(k), s.mean, s.mean - 3 * s.se);
  }
  return {ok, detail};
}

// 8
Outcome PolicyOrdering(const GridRun& run, double seconds) {
  const SweepPoint& pt = run.points[run.base_index];
  const std::vector<PolicyKind> order = {PolicyKind::kMgf, PolicyKind::kMaf,
                                         PolicyKind::kRandomized, PolicyKind::kRandomQueue};
  bool ok = seconds <= 600.0;
  std::string detail = "N=20 gaps/paired-se:";
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    auto gap = Summarize(Difference(Penalties(pt.records, order[i + 1]),
                                    Penalties(pt.records, order[i])));
    ok = ok && gap.mean > 0.0 && gap.mean >= 2 * gap.se;
    detail += fmt::format(" {}<{} {:.4f}/{:.4f}", PolicyName(order[i]), PolicyName(order[i + 1]),
                          gap.mean, gap.se);
  }
  std::map<PolicyKind, double> best;
  std::map<PolicyKind, std::size_t> where;
  for (const auto& p : run.points) {
    const double mgf = Summarize(Penalties(p.records, PolicyKind::kMgf)).mean;
    for (PolicyKind k : {PolicyKind::kRandomQueue, PolicyKind::kRandomized, PolicyKind::kMaf}) {
      const double ratio = Summarize(Penalties(p.records, k)).mean / mgf;
      if (ratio > best[k]) {
        best[k] = ratio;
        where[k] = p.agents;
      }
    }
  }
  ok = ok && best[PolicyKind::kRandomQueue] >= 4.0 && best[PolicyKind::kRandomized] >= 1.5 &&
       best[PolicyKind::kMaf] >= 1.2;
  detail += fmt::format("; best ratios random_queue {:.2f}x (N={}), randomized {:.2f}x (N={}), "
                        "maf {:.2f}x (N={})",
                        best[PolicyKind::kRandomQueue], where[PolicyKind::kRandomQueue],
                        best[PolicyKind::kRandomized], where[PolicyKind::kRandomized],
                        best[PolicyKind::kMaf], where[PolicyKind::kMaf]);
  return {ok, detail};
}

// 9
Outcome BoundaryProfile(const GridRun& run) {
  // Rows 6, 7, 13 and 14 counted from 1.
  const std::set<std::size_t> boundary = {5, 6, 12, 13};
  const std::vector<std::size_t> deltas = {1, 2, 5, 10};
  const auto& sols = run.points[run.base_index].dual.solutions;
  auto profiles = SummarizeProfiles(run.base_classes, sols, deltas);
  bool penalty_ok = true, spread_ok = true, gain_ok = true;
  std::string detail;
  for (std::size_t c = 0; c < run.base_classes.size(); ++c) {
    std::vector<const ProfileSummary*> mine;
    for (const auto& p : profiles) {
      if (p.class_id == c) mine.push_back(&p);
    }
    std::sort(mine.begin(), mine.end(), [](auto* a, auto* b) { return a->delta < b->delta; });
    penalty_ok = penalty_ok && boundary.count(mine.front()->argmax_penalty) > 0;
    gain_ok = gain_ok && boundary.count(mine.front()->argmax_gain) > 0;
    for (std::size_t i = 0; i + 1 < mine.size(); ++i) {
      const auto& small = mine[i]->high_penalty_set;
      const auto& large = mine[i + 1]->high_penalty_set;
      spread_ok = spread_ok && std::includes(large.begin(), large.end(), small.begin(), small.end());
    }
    std::string sets;
    for (auto* p : mine) sets += fmt::format(" {}", p->high_penalty_set.size());
    detail += fmt::format("{}: argmax q row {}, argmax gain row {}, high-set sizes{}; ",
                          run.base_classes[c].spec.name, mine.front()->argmax_penalty + 1,
                          mine.front()->argmax_gain + 1, sets);
  }
  detail += fmt::format("penalty peak {}, spread {}, gain peak {}", penalty_ok ? "ok" : "FAIL",
                        spread_ok ? "ok" : "FAIL", gain_ok ? "ok" : "FAIL");
  return {penalty_ok && spread_ok && gain_ok, detail};
}

// 10
Outcome ScalingTrend() {
  auto m = LoadConfig(kConfigDir + "/region20_scale.cfg");
  const std::vector<std::size_t> scales = {1, 2, 4, 8};
  const std::vector<PolicyKind> mgf = {PolicyKind::kMgf};
  auto points = RunSweep(m.sim, SweepAxis::kScale, scales, mgf, 20, m.dual, m.rvi);
  bool ok = true;
  std::string detail;
  std::vector<double> previous;
  double previous_bound = 0.0;
  for (const auto& p : points) {
    auto pen = Penalties(p.records, PolicyKind::kMgf);
    const double bound = p.dual.dual_value / static_cast<double>(p.agents);
    const auto s = Summarize(pen);
    detail += fmt::format("r={} mgf {:.4f} bound {:.4f} gap {:.4f}", p.value, s.mean, bound,
                          s.mean - bound);
    if (!previous.empty()) {
      const auto step = Summarize(Difference(pen, previous));
      // The gap difference is the penalty difference shifted by the change
      // in the bound, so it has the same paired standard error.
      const double gap_step = step.mean - (bound - previous_bound);
      ok = ok && step.mean <= 2 * step.se && gap_step <= 2 * step.se;
      detail += fmt::format(" (step {:+.4f}, gap step {:+.4f}, paired se {:.4f})", step.mean,
                            gap_step, step.se);
    }
    detail += "; ";
    previous = pen;
    previous_bound = bound;
  }
  return {ok, detail};
}

// 11
int RunCli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Body(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return CsvBody(ss.str());
}

Outcome Determinism() {
  const fs::path dir = fs::temp_directory_path() / "aoi_guard_acceptance";
  fs::remove_all(dir);
  const std::string grid = kConfigDir + "/region20.cfg";
  const std::string scale = kConfigDir + "/region20_scale.cfg";
  struct Case {
    std::string name;
    std::string args;
    std::vector<std::string> files;  // empty: the output path itself
  };
  const std::vector<Case> cases = {
      {"simulate", "simulate --config " + grid + " --slots 20000 --seed 7", {}},
      {"sweep", "sweep --config " + scale + " --slots 5000 --seed 7 --policy all", {}},
      {"profile", "profile --config " + grid + " --deltas 1,2,5,10 --seed 7", {}},
      {"solve",
       "solve --config " + grid + " --seed 7",
       {"tables_vertical_fast.csv", "tables_vertical_slow.csv", "dual_trace.csv"}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    std::vector<std::string> bodies[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / fmt::format("{}_{}", c.name, rep);
      if (RunCli(c.args + " --output " + out.string()) != 0) {
        ok = false;
        bodies[rep].push_back("<failed>");
        continue;
      }
      if (c.files.empty()) {
        bodies[rep].push_back(Body(out));
      } else {
        for (const auto& f : c.files) bodies[rep].push_back(Body(out / f));
      }
    }
    const bool same = bodies[0] == bodies[1] && !bodies[0].empty() && !bodies[0][0].empty();
    ok = ok && same;
    detail += fmt::format("{} {}; ", c.name, same ? "identical" : "DIFFERENT");
  }
  fs::remove_all(dir);
  return {ok, detail};
}

int Main() {
  int failures = 0;
  auto report = [&](int id, const char* title, const Outcome& o, double seconds) {
    if (!o.pass) ++failures;
    fmt::print("[{}] {:>2} {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail,
               seconds);
    std::fflush(stdout);
  };
  auto timed = [&](int id, const char* title, double limit, const std::function<Outcome()>& fn) {
    const auto start = Clock::now();
    Outcome o = fn();
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    if (limit > 0.0 && s > limit) {
      o.pass = false;
      o.detail += fmt::format(" [over {:.0f} s limit]", limit);
    }
    report(id, title, o, s);
  };

  timed(1, "estimator oracle equivalence", 10.0, EstimatorOracle);
  timed(2, "conditioning reduces entropy", 5.0, ConditioningReducesEntropy);
  timed(3, "averaged data processing", 30.0, AveragedDataProcessing);
  timed(4, "saturation", 0.0, Saturation);
  timed(5, "always send at zero price", 0.0, AlwaysSend);
  timed(6, "closed-form average cost", 0.0, ClosedForm);

  const auto start = Clock::now();
  const GridRun grid = RunRegionGrid();
  const double grid_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  timed(7, "dual feasibility and lower bound", 0.0, [&] { return DualFeasibility(grid); });
  timed(8, "policy ordering", 0.0, [&] { return PolicyOrdering(grid, grid_seconds); });
  fmt::print("   20-row region sweep took {:.1f} s\n", grid_seconds);
  timed(9, "boundary-peak profile", 0.0, [&] { return BoundaryProfile(grid); });
  timed(10, "scaling trend", 0.0, ScalingTrend);
  timed(11, "determinism", 0.0, Determinism);

  fmt::print("{} of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace aoi_guard

int main() { return aoi_guard::Main(); }
