#pragma once

// Energy functional, its radial derivatives, Rayleigh quotients, Nehari
// classification and the weak-formulation residual.

#include <cstdint>
#include <string_view>
#include <vector>

#include "nehari/problem.hpp"

namespace nehari {

struct EnergyBreakdown {
  double energy = 0.0;
  double d1 = 0.0;  // E'(z)z
  double d2 = 0.0;  // E''(z)(z, z)
  PairSummary summary;
};

enum class NehariTag { plus, minus, zero, off };
std::string_view to_string(NehariTag t) noexcept;

struct NehariClass {
  NehariTag tag = NehariTag::off;
  double tol = 0.0;
};

inline constexpr double kDefaultClassifyTol = 1e-6;

// The three radial quantities from a cached summary.
EnergyBreakdown breakdown_from_summary(const ProblemConfig& cfg, const PairSummary& s,
                                       double lambda);
EnergyBreakdown breakdown(const Problem& prob, const FieldPair& z, double lambda);

// R_n = (A - theta B)/(P + Q), R_e = (A/2 - theta B/eta)/(P/(1-p) + Q/(1-q)).
double rayleigh_from_summary(const ProblemConfig& cfg, const PairSummary& s, FiberKind kind);
double rayleigh(const Problem& prob, const FieldPair& z, FiberKind kind);

// (A, B, P, Q) with the configured exponents; throws DomainError when B <= 0.
FiberCoefficients fiber_coefficients(const Problem& prob, const FieldPair& z);
FiberCoefficients fiber_coefficients(const ProblemConfig& cfg, const PairSummary& s);

// `tol` is relative to A: |d1| <= tol*A counts as on the Nehari set, and
// d2 beyond +-tol*A decides the side.
NehariClass classify_breakdown(const EnergyBreakdown& e, double tol);
NehariClass classify(const Problem& prob, const FieldPair& z, double lambda,
                     double tol = kDefaultClassifyTol);

// <z, phi> - theta/eta int(alpha |u|^{alpha-2} u |v|^beta phi1 + beta |u|^alpha
// |v|^{beta-2} v phi2) - lambda int(a u^{-p} phi1 + b v^{-q} phi2). Throws
// SingularityError when u or v has a nonpositive node.
double weak_residual(const Problem& prob, const FieldPair& z, const FieldPair& phi, double lambda);

// Nodal L2 gradient of the energy at a strictly positive pair, so that
// weak_residual(z, phi) = inner(g.u, phi1) + inner(g.v, phi2).
FieldPair energy_gradient(const Problem& prob, const FieldPair& z, double lambda);

// Test pairs: the lowest Fourier modes split evenly between the two
// components, plus `random_count` random smooth pairs.
std::vector<FieldPair> test_battery(const Problem& prob, int size, int random_count,
                                    std::uint64_t seed, std::uint64_t stream);

// max over the battery of |weak_residual| / ||phi||_X.
double battery_residual(const Problem& prob, const FieldPair& z, double lambda,
                        const std::vector<FieldPair>& battery);

}  // namespace nehari
