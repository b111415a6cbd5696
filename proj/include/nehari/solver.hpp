#pragma once

// Nehari-constrained minimization on the two branches, solution
// verification, and continuation in lambda.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nehari/energy.hpp"
#include "nehari/error.hpp"
#include "nehari/extremal.hpp"

namespace nehari {

enum class Branch { plus, minus };
std::string_view to_string(Branch b) noexcept;
Branch branch_from(std::string_view s);
NehariTag expected_tag(Branch b) noexcept;

// Projection failures: no roots (lambda above the fiber peak) or a level
// within tolerance of the peak.
class ProjectionError : public NumericError {
 public:
  enum class Reason { no_roots, degenerate };
  ProjectionError(Reason r, const std::string& what) : NumericError(what), reason_(r) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

struct SolverOptions {
  double tol_energy = 1e-10;
  double tol_residual = 1e-6;
  int max_iters = 5000;
  int battery_size = 64;
  int battery_random = 16;
  std::uint64_t seed = 0;
  double classify_tol = kDefaultClassifyTol;
  bool newton = true;
  int newton_iters = 40;
  // Newton systems with at most this many unknowns use a dense LU, larger
  // ones matrix-free MINRES.
  int dense_limit = 4096;
  // When set, lambda within 1% of this value flags proximity to the
  // degenerate set and tightens tol_energy by 100x.
  std::optional<double> lambda_star_hint;
};

struct NehariSolution {
  FieldPair pair;
  double lambda = 0.0;
  Branch branch = Branch::plus;
  double energy = 0.0;
  double residual = 0.0;
  NehariClass classification;
  EnergyBreakdown breakdown;
  int iterations = 0;
  int newton_steps = 0;
  bool converged = false;
  bool near_degenerate = false;
};

// Raised by minimize_branch when it does not meet its tolerances; carries the
// last iterate.
class SolveError : public NumericError {
 public:
  SolveError(const std::string& what, NehariSolution last) : NumericError(what), last_(std::move(last)) {}
  const NehariSolution& last() const noexcept { return last_; }

 private:
  NehariSolution last_;
};

// Scale of the direction onto N^+ or N^- at lambda.
double projection_scale(const Problem& prob, const FieldPair& dir, Branch branch, double lambda);
FieldPair project(const Problem& prob, const FieldPair& dir, Branch branch, double lambda);

NehariSolution minimize_branch(const Problem& prob, Branch branch, const FieldPair& init,
                               double lambda, const SolverOptions& opts = {});

// A positive starting pair: Gaussian bumps matched to the weights' width.
FieldPair default_initial_pair(const Problem& prob);

struct SweepRow {
  double lambda = 0.0;
  bool ok_plus = false, ok_minus = false;
  double c_plus = 0.0, c_minus = 0.0;
  int e_minus_sign = 0;
  int iters_plus = 0, iters_minus = 0;
  double residual_plus = 0.0, residual_minus = 0.0;
  NehariTag class_plus = NehariTag::off, class_minus = NehariTag::off;
  // Projection scales of the frozen direction, when one is supplied.
  double t_plus = 0.0, t_minus = 0.0;
  std::string error_plus, error_minus;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<NehariSolution> plus, minus;  // last solution per row (may be unconverged)

  bool plus_nonincreasing(double rel_slack = 1e-9) const;
  bool minus_nonincreasing(double rel_slack = 1e-9) const;
  // No Zero classification for rows with lambda < bound.
  bool no_zero_below(double bound) const;
  bool frozen_scales_monotone() const;
  bool all_ok() const;
};

SweepReport sweep(const Problem& prob, const std::vector<double>& lambdas, const FieldPair& init,
                  const SolverOptions& opts = {},
                  const std::optional<FieldPair>& frozen_direction = std::nullopt);

// Root of lambda -> C_{N^-}(lambda) inside [lo, hi]; the Minus energy must
// be positive at lo and negative at hi.
struct CrossingResult {
  double lambda = 0.0;
  double energy_lo = 0.0, energy_hi = 0.0;
  int evaluations = 0;
};
CrossingResult find_minus_crossing(const Problem& prob, double lo, double hi, const FieldPair& init,
                                   const SolverOptions& opts = {}, double rel_tol = 1e-5);

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyOptions {
  int battery_size = 64;
  int battery_random = 16;
  std::uint64_t seed = 0;
  std::uint64_t stream = 7;
  double tol_residual = 1e-6;
  double classify_tol = kDefaultClassifyTol;
  // Floors from diagnostic_bounds with a certified S; skipped when absent.
  std::optional<DiagnosticBounds> bounds;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

VerifyReport verify_solution(const Problem& prob, const NehariSolution& sol,
                             const VerifyOptions& opts = {});

}  // namespace nehari
