#pragma once

// A full problem instance: grid, potentials, singular weights and exponents.

#include <string_view>

#include "nehari/fiber.hpp"
#include "nehari/field.hpp"

namespace nehari {

// V(x) = v0 + strength * |x|^2 (constant when strength = 0).
enum class PotentialKind { constant, harmonic };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::harmonic;
  double v0 = 1.0;
  double strength = 0.05;

  bool operator==(const PotentialSpec&) const = default;
};

// constant: amplitude; gaussian: amplitude * exp(-|x|^2 / (2 width^2));
// lorentzian: amplitude / (1 + |x|^2 / width^2).
enum class WeightKind { constant, gaussian, lorentzian };

struct WeightSpec {
  WeightKind kind = WeightKind::gaussian;
  double amplitude = 1.0;
  double width = 2.0;

  bool operator==(const WeightSpec&) const = default;
};

std::string_view to_string(PotentialKind k) noexcept;
std::string_view to_string(WeightKind k) noexcept;
PotentialKind potential_kind_from(std::string_view s);
WeightKind weight_kind_from(std::string_view s);

struct ProblemConfig {
  GridSpec grid;
  PotentialSpec V1, V2;
  WeightSpec a, b;
  double p = 0.5;
  double q = 0.5;
  double alpha = 2.0;
  double beta = 2.0;
  double theta = 1.0;
  double lambda = 0.1;
  double frac_norm_constant = 1.0;
  // Strict positivity floor for solver iterates.
  double floor = 1e-8;

  double eta() const noexcept { return alpha + beta; }
  // 2N / (N - 2s); infinite when N <= 2s.
  double critical_exponent() const noexcept;

  // Throws ValidationError naming "(P)", "(P_0)" or "(V_0)", or
  // PreconditionError for malformed grid/solver settings.
  void validate() const;

  SummaryParams summary_params() const noexcept {
    return {p, q, alpha, beta, frac_norm_constant};
  }

  bool operator==(const ProblemConfig&) const = default;
};

// Validated configuration with its grid and coefficient fields built.
struct Problem {
  ProblemConfig cfg;
  GridPtr grid;
  CoefficientFields coeff;
  // min over the grid of V1 and V2.
  double v_min = 0.0;

  static Problem build(const ProblemConfig& cfg);
  // Validated problem with caller-supplied coefficient fields.
  static Problem build(const ProblemConfig& cfg, const CoefficientFields& coeff);
  // No hypothesis checks beyond grid consistency; for diagnostics on
  // configurations outside (P), such as s = 1/2 in one dimension.
  static Problem assemble(const ProblemConfig& cfg, const CoefficientFields& coeff);

  FiberCoefficients fiber(const PairSummary& s) const;
};

ScalarField make_potential(const GridPtr& grid, const PotentialSpec& spec);
ScalarField make_weight(const GridPtr& grid, const WeightSpec& spec);

}  // namespace nehari
