#pragma once

// Sobolev-preconditioned descent over strictly positive direction pairs for
// zero-homogeneous objectives (fiber peaks, projected energies).

#include <functional>
#include <optional>

#include "nehari/field.hpp"
#include "nehari/problem.hpp"

namespace nehari::detail {

struct DescentOptions {
  int max_iters = 5000;
  // Stop after `patience` consecutive accepted steps with relative decrease
  // below tol_rel.
  double tol_rel = 1e-10;
  int patience = 3;
  double floor = 1e-8;
};

struct DescentResult {
  FieldPair w;
  double value = 0.0;
  int iterations = 0;
  int rejected = 0;
  bool converged = false;
};

// Returns the objective at w and, when `grad` is non-null, its nodal L2
// gradient. std::nullopt marks an inadmissible direction (the step is
// rejected and shrunk).
using Objective = std::function<std::optional<double>(const FieldPair& w, FieldPair* grad)>;

// w / ||w||_X.
FieldPair normalize(const Problem& prob, FieldPair w);
// max(|w|, floor) componentwise.
FieldPair clamp_positive(FieldPair w, double floor);

DescentResult preconditioned_descent(const Problem& prob, const FieldPair& w0, const Objective& f,
                                     const DescentOptions& opts);

}  // namespace nehari::detail
