#pragma once

// The invariant suite behind `nehari verify` and the acceptance binary.
// Checks are grouped by criterion; expensive intermediate results (extremal
// estimates, solutions, the sweep) are computed once and shared.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nehari/config.hpp"
#include "nehari/rng.hpp"

namespace nehari {

struct SuiteCheck {
  std::string suite;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

bool all_passed(const std::vector<SuiteCheck>& checks);

// Random draws used by the property checks.
FiberCoefficients random_fiber_coefficients(CounterRng& rng, bool equal_exponents);
FieldPair random_positive_pair(const Problem& prob, CounterRng& rng);

class InvariantSuite {
 public:
  // Throws ValidationError / ConfigError through validate_run_config.
  explicit InvariantSuite(RunConfig cfg);

  const RunConfig& config() const noexcept { return cfg_; }
  const Problem& problem() const noexcept { return prob_; }

  // Criteria 1-10, in order. Exceptions inside a group become failed checks.
  std::vector<SuiteCheck> closed_forms();
  std::vector<SuiteCheck> difference_identity();
  std::vector<SuiteCheck> unique_maximum();
  std::vector<SuiteCheck> derivative_relations();
  std::vector<SuiteCheck> sign_equivalences();
  std::vector<SuiteCheck> spectral();
  std::vector<SuiteCheck> extremal_ordering();
  std::vector<SuiteCheck> two_solutions();
  std::vector<SuiteCheck> continuation();
  std::vector<SuiteCheck> floors_and_sandwich();
  // Further diagnostics: level-root ordering, embedding constants, the
  // C_rho lower bound and per-solution verification reports.
  std::vector<SuiteCheck> diagnostics();

  std::vector<SuiteCheck> run_all();

  // Estimates computed so far (lambda*, lambda_*, crossing, constants).
  nlohmann::ordered_json estimates_json() const;

 private:
  struct Solved {
    std::string label;
    std::optional<NehariSolution> sol;
    std::string error;
  };

  const ExtremalEstimate& star();
  const ExtremalEstimate& sub();
  const DiagnosticBounds& certified_bounds();
  const Solved& solve(const std::string& label, Branch b, double lambda);
  const SweepReport& sweep_report();

  int samples(int divisor) const;
  std::uint64_t stream(std::uint64_t group) const;

  RunConfig cfg_;
  Problem prob_;
  FieldPair init_;
  std::optional<ExtremalEstimate> star_, sub_;
  std::optional<DiagnosticBounds> bounds_;
  std::optional<double> s_certified_, s_lower_;
  std::map<std::string, Solved> solved_;
  std::optional<SweepReport> sweep_;
  std::optional<double> crossing_;
};

nlohmann::ordered_json to_json(const SuiteCheck& c);

}  // namespace nehari
