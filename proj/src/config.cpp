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

#include "aoi_guard/config.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

namespace aoi_guard {

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

// A validation error that already carries a key path and line.
class KeyedError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Walks the document with a key path for error messages.
class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void Fail(const YAML::Node& near, const std::string& key,
                         const std::string& message) const {
    const YAML::Mark mark = near.Mark();
    if (mark.line >= 0) {
      throw KeyedError(fmt::format("{}:{}: '{}': {}", origin_, mark.line + 1, key, message));
    }
    throw KeyedError(fmt::format("{}: '{}': {}", origin_, key, message));
  }

  template <typename T>
  T As(const YAML::Node& node, const std::string& key) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      Fail(node, key, fmt::format("cannot read '{}' as {}", YAML::Dump(node), TypeName<T>()));
    }
  }

  template <typename T>
  T Required(const YAML::Node& parent, const std::string& path, const char* key) const {
    const YAML::Node node = parent[key];
    if (!node) Fail(parent, Join(path, key), "required key is missing");
    return As<T>(node, Join(path, key));
  }

  template <typename T>
  T Optional(const YAML::Node& parent, const std::string& path, const char* key,
             T fallback) const {
    const YAML::Node node = parent[key];
    if (!node) return fallback;
    return As<T>(node, Join(path, key));
  }

  static std::string Join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
  }
  static std::string Index(const std::string& path, std::size_t i) {
    return fmt::format("{}[{}]", path, i);
  }

 private:
  template <typename T>
  static const char* TypeName() {
    if constexpr (std::is_same_v<T, double>) return "a number";
    else if constexpr (std::is_integral_v<T>) return "a non-negative integer";
    else return "a string";
  }

  std::string origin_;
};

DenseMatrix ReadMatrix(const Reader& r, const YAML::Node& rows, const std::string& path) {
  if (!rows.IsSequence() || rows.size() == 0) r.Fail(rows, path, "expected a list of rows");
  const std::size_t n = rows.size();
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const YAML::Node row = rows[i];
    const std::string row_path = Reader::Index(path, i);
    if (!row.IsSequence() || row.size() != n) {
      r.Fail(row, row_path, fmt::format("expected {} entries", n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = r.As<double>(row[j], Reader::Index(row_path, j));
    }
  }
  return m;
}

struct SourceSpec {
  SourcePtr source;
  std::size_t grid_cols = 0;  // nonzero for 2D grids labelled by row
};

SourceSpec ReadSource(const Reader& r, const YAML::Node& node, const std::string& path,
                      std::size_t delta_bound) {
  if (!node || !node.IsMap()) r.Fail(node, path, "expected a mapping");
  const std::string type = r.Optional<std::string>(node, path, "type", "matrix");
  try {
    if (type == "row_chain") {
      const auto rows = r.Required<std::size_t>(node, path, "rows");
      const auto up = r.Required<double>(node, path, "up");
      const auto down = r.Required<double>(node, path, "down");
      return {BuildRowChain(rows, up, down, delta_bound), 0};
    }
    if (type == "grid") {
      const auto rows = r.Required<std::size_t>(node, path, "rows");
      const auto cols = r.Required<std::size_t>(node, path, "cols");
      DenseMatrix m = GridChainMatrix(
          rows, cols, r.Required<double>(node, path, "up"), r.Required<double>(node, path, "down"),
          r.Required<double>(node, path, "left"), r.Required<double>(node, path, "right"));
      return {std::make_shared<const MarkovSource>(std::move(m), delta_bound), cols};
    }
    if (type == "matrix") {
      const YAML::Node rows = node["rows"];
      if (!rows) r.Fail(node, Reader::Join(path, "rows"), "required key is missing");
      return {std::make_shared<const MarkovSource>(
                  ReadMatrix(r, rows, Reader::Join(path, "rows")), delta_bound),
              0};
    }
  } catch (const KeyedError&) {
    throw;
  } catch (const Error& e) {
    r.Fail(node, path, e.what());
  }
  r.Fail(node, Reader::Join(path, "type"),
         fmt::format("unknown source type '{}' (row_chain | grid | matrix)", type));
}

SafetyMap ReadSafety(const Reader& r, const YAML::Node& node, const std::string& path,
                     std::size_t row_states) {
  if (!node || !node.IsMap()) r.Fail(node, path, "expected a mapping");
  try {
    if (const YAML::Node bands = node["bands"]) {
      const auto sizes = r.As<std::vector<std::size_t>>(bands, Reader::Join(path, "bands"));
      return SafetyMap::Bands(sizes);
    }
    if (const YAML::Node assignment = node["assignment"]) {
      auto labels = r.As<std::vector<std::size_t>>(assignment, Reader::Join(path, "assignment"));
      std::size_t label_count = 0;
      for (std::size_t l : labels) label_count = std::max(label_count, l + 1);
      label_count = r.Optional<std::size_t>(node, path, "labels", label_count);
      return SafetyMap(label_count, std::move(labels));
    }
    if (r.Optional<bool>(node, path, "identity", false)) return SafetyMap::Identity(row_states);
  } catch (const KeyedError&) {
    throw;
  } catch (const Error& e) {
    r.Fail(node, path, e.what());
  }
  r.Fail(node, path, "expected one of 'bands', 'assignment' or 'identity: true'");
}

LossMatrix ReadLoss(const Reader& r, const YAML::Node& node, const std::string& path) {
  if (!node) r.Fail(node, path, "required key is missing");
  std::string type;
  if (node.IsScalar()) {
    type = r.As<std::string>(node, path);
  } else if (node.IsMap()) {
    type = r.Optional<std::string>(node, path, "type", "matrix");
  } else {
    r.Fail(node, path, "expected a loss name or mapping");
  }
  try {
    if (type == "safety_example") return SafetyExampleLoss();
    if (type == "zero_one") {
      if (node.IsScalar()) r.Fail(node, path, "zero_one needs 'labels'");
      return ZeroOneLoss(r.Required<std::size_t>(node, path, "labels"));
    }
    if (type == "quadratic") {
      if (node.IsScalar()) r.Fail(node, path, "quadratic needs 'values'");
      const auto values = r.Required<std::vector<double>>(node, path, "values");
      return QuadraticLoss(values);
    }
    if (type == "matrix" && node.IsMap()) {
      const YAML::Node rows = node["rows"];
      if (!rows || !rows.IsSequence()) r.Fail(node, Reader::Join(path, "rows"), "expected rows");
      const std::size_t n = rows.size();
      std::vector<double> entries;
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = r.As<std::vector<double>>(rows[i], Reader::Index(path + ".rows", i));
        if (row.size() != n) {
          r.Fail(rows[i], Reader::Index(path + ".rows", i), fmt::format("expected {} entries", n));
        }
        entries.insert(entries.end(), row.begin(), row.end());
      }
      return LossMatrix(n, std::move(entries));
    }
  } catch (const KeyedError&) {
    throw;
  } catch (const Error& e) {
    r.Fail(node, path, e.what());
  }
  r.Fail(node, path,
         fmt::format("unknown loss '{}' (safety_example | zero_one | quadratic | matrix)", type));
}

std::vector<PolicyKind> ReadPolicies(const Reader& r, const YAML::Node& root) {
  const YAML::Node node = root["policy"];
  const std::string expected = fmt::format("expected one of: {}", PolicyNameList());
  if (!node) r.Fail(root, "policy", "required key is missing; " + expected);
  std::vector<std::string> names;
  if (node.IsSequence()) {
    names = r.As<std::vector<std::string>>(node, "policy");
  } else {
    names.push_back(r.As<std::string>(node, "policy"));
  }
  std::vector<PolicyKind> out;
  for (const std::string& name : names) {
    if (name == "all") {
      out.assign(kAllPolicies.begin(), kAllPolicies.end());
      continue;
    }
    const auto kind = ParsePolicy(name);
    if (!kind) r.Fail(node, "policy", fmt::format("unknown policy '{}'; {}", name, expected));
    out.push_back(*kind);
  }
  if (out.empty()) r.Fail(node, "policy", expected);
  return out;
}

}  // namespace

RunManifest ParseConfig(std::string_view text, std::string_view origin) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(fmt::format("{}:{}:{}: {}", origin, e.mark.line + 1, e.mark.column + 1, e.msg));
  }
  Reader r{std::string(origin)};
  if (!root.IsMap()) throw ParseError(fmt::format("{}: top level must be a mapping", origin));

  RunManifest m;
  m.config_path = std::string(origin);
  m.config_digest = Sha256Hex(text);
  m.name = r.Optional<std::string>(root, "", "name", "unnamed");

  SimConfig& sim = m.sim;
  sim.delta_bound = r.Optional<std::size_t>(root, "", "delta_bound", kDefaultDeltaBound);
  if (sim.delta_bound < 1) r.Fail(root["delta_bound"], "delta_bound", "must be at least 1");
  sim.channels = r.Required<std::size_t>(root, "", "channels");
  if (sim.channels < 1) r.Fail(root["channels"], "channels", "must be at least 1");

  m.policies = ReadPolicies(r, root);
  sim.policy = m.policies.front();

  const YAML::Node simulation = root["simulation"];
  if (simulation) {
    sim.slots = r.Optional<std::uint64_t>(simulation, "simulation", "slots", sim.slots);
    sim.warmup = r.Optional<std::uint64_t>(simulation, "simulation", "warmup", sim.slots / 10);
    sim.seed = r.Optional<std::uint64_t>(simulation, "simulation", "seed", sim.seed);
    m.replications = r.Optional<std::size_t>(simulation, "simulation", "replications", 1);
  } else {
    sim.warmup = sim.slots / 10;
  }
  if (sim.slots <= sim.warmup) {
    r.Fail(simulation, "simulation.slots", "must exceed simulation.warmup");
  }
  if (m.replications < 1) r.Fail(simulation, "simulation.replications", "must be at least 1");

  if (const YAML::Node solver = root["solver"]) {
    m.rvi.tol = r.Optional<double>(solver, "solver", "tol", m.rvi.tol);
    m.rvi.max_iters = r.Optional<std::size_t>(solver, "solver", "max_iters", m.rvi.max_iters);
    m.rvi.evaluate_every =
        r.Optional<std::size_t>(solver, "solver", "evaluate_every", m.rvi.evaluate_every);
    m.dual.beta = r.Optional<double>(solver, "solver", "beta", m.dual.beta);
    m.dual.eval_horizon =
        r.Optional<std::size_t>(solver, "solver", "eval_horizon", m.dual.eval_horizon);
    m.dual.outer_iters =
        r.Optional<std::size_t>(solver, "solver", "outer_iters", m.dual.outer_iters);
    if (!(m.rvi.tol > 0.0)) r.Fail(solver, "solver.tol", "must be positive");
    if (!(m.dual.beta > 0.0)) r.Fail(solver, "solver.beta", "must be positive");
    if (m.dual.eval_horizon < 1) r.Fail(solver, "solver.eval_horizon", "must be at least 1");
    if (m.dual.outer_iters < 1) r.Fail(solver, "solver.outer_iters", "must be at least 1");
  }

  const YAML::Node classes = root["classes"];
  if (!classes || !classes.IsSequence() || classes.size() == 0) {
    r.Fail(root, "classes", "expected a non-empty list of agent classes");
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const YAML::Node node = classes[i];
    const std::string path = Reader::Index("classes", i);
    AgentClassSpec spec{
        r.Optional<std::string>(node, path, "name", fmt::format("class{}", i)),
        nullptr,
        SafetyMap(1, {}),
        ZeroOneLoss(1),
        r.Optional<double>(node, path, "success_prob", 1.0),
        r.Optional<std::size_t>(node, path, "members", 1),
    };
    const SourceSpec source =
        ReadSource(r, node["source"], Reader::Join(path, "source"), sim.delta_bound);
    spec.source = source.source;
    const std::size_t rows = source.grid_cols ? source.source->state_count() / source.grid_cols
                                              : source.source->state_count();
    spec.safety = ReadSafety(r, node["safety"], Reader::Join(path, "safety"), rows);
    if (source.grid_cols) spec.safety = GridSafetyFromRows(spec.safety, source.grid_cols);
    spec.loss = ReadLoss(r, node["loss"], Reader::Join(path, "loss"));
    try {
      sim.classes.push_back(PrepareClass(std::move(spec), sim.delta_bound));
    } catch (const KeyedError&) {
      throw;
    } catch (const Error& e) {
      r.Fail(node, path, e.what());
    }
  }

  if (const YAML::Node sweep = root["sweep"]) {
    SweepSettings s;
    const auto axis_name = r.Required<std::string>(sweep, "sweep", "axis");
    const auto axis = ParseSweepAxis(axis_name);
    if (!axis) {
      r.Fail(sweep["axis"], "sweep.axis",
             fmt::format("unknown axis '{}' (agents | channels | scale)", axis_name));
    }
    s.axis = *axis;
    s.values = r.Required<std::vector<std::size_t>>(sweep, "sweep", "values");
    for (std::size_t v : s.values) {
      if (v < 1) r.Fail(sweep["values"], "sweep.values", "values must be positive");
    }
    m.sweep = std::move(s);
  }
  if (const YAML::Node profile = root["profile"]) {
    m.profile_deltas = r.Required<std::vector<std::size_t>>(profile, "profile", "deltas");
    for (std::size_t d : m.profile_deltas) {
      if (d < 1 || d > sim.delta_bound) {
        r.Fail(profile["deltas"], "profile.deltas",
               fmt::format("age {} outside [1, {}]", d, sim.delta_bound));
      }
    }
  }

  try {
    sim.Validate();
  } catch (const Error& e) {
    throw ValidationError(fmt::format("{}: {}", origin, e.what()));
  }
  return m;
}

RunManifest LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading config '{}'", path.string()));
  return ParseConfig(buffer.str(), path.string());
}

}  // namespace aoi_guard
