#pragma once

// Estimates of the extremal parameters lambda^* = inf Lambda_n and
// lambda_* = inf Lambda_e over trial families, embedding constants, and the
// norm and coupling floors derived from them.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nehari/energy.hpp"

namespace nehari {

enum class FamilyKind { fourier_modes, gaussian_bumps, custom };
std::string_view to_string(FamilyKind k) noexcept;
FamilyKind family_kind_from(std::string_view s);

using ParamBounds = std::vector<std::pair<double, double>>;
using MemberGenerator =
    std::function<FieldPair(const Problem&, int member, const std::vector<double>& params)>;

// fourier_modes, member k: u = 1 + a_u cos(k pi x/L), v = kappa (1 + a_v cos(k pi x/L)),
//   params (a_u, a_v, kappa); member 0 is the constant pair.
// gaussian_bumps, member k: u = exp(-|x|^2/(2 su^2)), v = kappa exp(-|x|^2/(2 sv^2)),
//   params (su, sv, kappa), starting widths spread geometrically over the bounds.
// custom: caller-supplied generator, bounds and starting points.
struct TrialFamily {
  FamilyKind kind = FamilyKind::gaussian_bumps;
  int count = 8;
  MemberGenerator generator;
  ParamBounds bounds;
  std::function<std::vector<double>(int member)> initial;

  static TrialFamily fourier_modes(int count);
  static TrialFamily gaussian_bumps(int count);
  static TrialFamily custom(int count, MemberGenerator gen, ParamBounds bounds,
                            std::function<std::vector<double>(int)> initial);

  ParamBounds parameter_bounds(const Problem& prob) const;
  std::vector<double> initial_params(const Problem& prob, int member) const;
  FieldPair member(const Problem& prob, int index, const std::vector<double>& params) const;
  std::string descriptor() const;
};

enum class ExtremalKind { star, sub };
std::string_view to_string(ExtremalKind k) noexcept;
inline FiberKind fiber_kind(ExtremalKind k) noexcept {
  return k == ExtremalKind::star ? FiberKind::nehari : FiberKind::energy;
}

struct ExtremalOptions {
  bool refine = true;  // coordinate-wise golden section on member parameters
  int restarts = 8;    // sweeps over the coordinates
  int golden_iters = 40;
  bool polish = true;  // full-field descent from the best member
  int polish_iters = 4000;
  double polish_tol = 1e-12;
};

struct MemberRecord {
  int index = 0;
  bool skipped = false;
  double value = 0.0;  // refined Lambda of the member
  std::vector<double> params;
};

struct ExtremalEstimate {
  ExtremalKind kind = ExtremalKind::star;
  double value = 0.0;
  FieldPair argmin;  // normalized to ||(u, v)|| = 1
  int iterations = 0;
  bool converged = false;
  int best_member = -1;
  double family_value = 0.0;  // before the full-field polish
  std::vector<MemberRecord> members;
};

// Lambda_n or Lambda_e of a pair; throws DomainError outside the admissible set.
double lambda_of(const Problem& prob, const FieldPair& z, FiberKind kind);

ExtremalEstimate estimate_extremal(const Problem& prob, const TrialFamily& family,
                                   ExtremalKind kind, const ExtremalOptions& opts = {});

// max over pairs of (|u|_r + |v|_r) / ||(u, v)||, a lower bound for S_r.
double embedding_constant_lb(const Problem& prob, double r, const std::vector<FieldPair>& pairs);

// Upper bound for the discrete S_r from the spectral sum
// M = sum_xi 1/(c|xi|^{2s} + Vmin) / (2L)^N: sqrt(2) (M^{(r-2)/2} / Vmin)^{1/r}.
double embedding_constant_certified(const Problem& prob, double r);

struct EmbeddingEstimate {
  double r = 0.0;
  double lower = 0.0;      // sampled
  double certified = 0.0;  // analytic upper bound on this grid
  double safety_factor = 2.0;
  double safety() const noexcept { return safety_factor * lower; }
};

struct DiagnosticBounds {
  double S = 0.0;  // the S_{alpha+beta} value used
  double rho_tilde = 0.0;
  double rho = 0.0;
  double norm_floor = 0.0;  // C for Minus points
  double delta_C = 0.0;
  double C_rho = 0.0;       // lower bound for lambda^*
  double f_p = 0.0, f_q = 0.0;
};

// Floors from S = S_{alpha+beta}; C_rho additionally uses S_2 <= 1/sqrt(Vmin)
// and the norms of a, b.
DiagnosticBounds diagnostic_bounds(const Problem& prob, double S);

}  // namespace nehari
