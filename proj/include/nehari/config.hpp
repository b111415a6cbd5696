#pragma once

// Run configuration: a line-based `key = value` format with dotted section
// prefixes, or the same keys as nested JSON objects. Both parsers feed one
// validator.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nehari/extremal.hpp"
#include "nehari/solver.hpp"

namespace nehari {

struct FamilySpec {
  FamilyKind kind = FamilyKind::gaussian_bumps;
  int count = 8;
  int restarts = 8;
  bool polish = true;

  bool operator==(const FamilySpec&) const = default;
};

struct SolverSettings {
  double tol_energy = 1e-10;
  double tol_residual = 1e-6;
  int max_iters = 5000;
  int battery_size = 64;
  int battery_random = 16;

  bool operator==(const SolverSettings&) const = default;
};

struct RunConfig {
  ProblemConfig problem;
  FamilySpec family;
  SolverSettings solver;
  double safety_factor = 2.0;
  int sweep_points = 8;
  double sweep_fraction = 0.9;
  FiberCoefficients fiber;
  std::vector<double> fiber_levels{0.1};
  // Random instances per property check in `verify`.
  int verify_samples = 1000;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  SolverOptions solver_options() const;
  ExtremalOptions extremal_options() const;
  TrialFamily trial_family() const;

  bool operator==(const RunConfig& o) const;
};

// Throw ConfigError (line-anchored) for malformed input and ValidationError
// for violated hypotheses.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_json(const std::string& text);
// Picks the parser from the extension (.json) or a leading '{'.
RunConfig load_config(const std::filesystem::path& path);

void validate_run_config(const RunConfig& cfg);

std::string serialize_config(const RunConfig& cfg);
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

}  // namespace nehari
