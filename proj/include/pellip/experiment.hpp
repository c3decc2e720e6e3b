#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pellip/discretize.hpp"
#include "pellip/grid.hpp"

namespace pellip {

using json = nlohmann::json;

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"ellipticity", "semigroup",       "imaginary-powers", "maximal",
                                              "ergodic",     "difference",      "duhamel",          "transfer",
                                              "subordinate", "square-function", "two-param",        "full-suite"};
  return kinds;
}

struct DomainSpec {
  int dim = 1;
  std::vector<double> extents{1.0};
  std::vector<int> resolution{128};

  Grid grid() const;
};

struct Parameters {
  std::vector<double> p{2.0, 4.0};
  std::vector<double> alpha{0.25};
  std::vector<double> gamma{1.0, 0.5};
  int per_decade = 60;
  std::uint64_t seed = 1;
  int samples = 50;
  int greedy_steps = 200;
  int two_param_samples = 3;
  int two_param_per_decade = 10;
  int n_quad = 512;
  double t = 1.0;
  double u_max = 10.0;
  double truncation_u = 60.0;
  int mellin_nodes = 4000;
  std::map<std::string, double> tolerances;  // overrides by check name

  double tolerance(const std::string& check, double fallback) const;
};

struct ExperimentConfig {
  std::string kind = "full-suite";
  DomainSpec domain;
  json bc = {{"kind", "dirichlet"}};
  json field = {{"library", "complex_checkerboard"}};
  std::optional<json> second_field;
  Parameters params;
  std::string output_dir = "out";

  /// Effective configuration in canonical form, the basis of the hash.
  json canonical() const;
  std::string hash() const;
};

/// Throws Error(config) naming the offending key path; syntax errors carry the line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json(const json& j);

/// A field together with what is known about how it was built.
struct BuiltField {
  MatrixField field;
  std::optional<double> rotation;      // A = e^{iθ} B
  std::optional<MatrixField> real_base;  // B
};

BuiltField build_field(const json& spec, const Grid& grid, const std::string& path = "field");

/// identity, real_symmetric, real_nonsymmetric, rotated_real, complex_checkerboard.
const std::vector<std::string>& library_fields();
BuiltField library_field(const std::string& name, const Grid& grid);

BoundaryCondition build_bc(const json& spec, const std::string& path = "bc");

struct Check {
  double value = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";  // value relation tolerance
  bool passed = false;
  bool advisory = false;  // counts as a warning, a failure only under --strict
};

struct ExperimentRecord {
  std::string config_hash;
  std::string experiment;
  std::vector<int> resolution;
  std::string field;
  std::map<std::string, Check> checks;
  std::map<std::string, json> metrics;
  std::vector<std::string> artifacts;
  double wall_clock = 0.0;

  void check_le(const std::string& name, double value, double tol, bool advisory = false);
  void check_ge(const std::string& name, double value, double tol, bool advisory = false);
  void check_true(const std::string& name, bool ok, bool advisory = false);

  int failures(bool strict) const;
  int warnings() const;
  /// Deterministic part of the record; wall-clock time is kept out.
  json summary() const;
  static ExperimentRecord from_summary(const json& j);
};

/// Runs the configured experiment; writes summary.json, timing.json and CSV
/// tables into the output directory when `write` is set.
ExperimentRecord run(const ExperimentConfig& config, bool write = true);

/// Pass/fail matrix keyed by (experiment, check) with a drift column for
/// pairs of records of one experiment at different resolutions.
struct ReportTable {
  std::string text;
  bool all_passed = true;
};

ReportTable report(const std::vector<ExperimentRecord>& records, bool strict = false);

}  // namespace pellip
