#pragma once

// Fields on the periodic grid, the X-norm with potentials, and rectangle-rule
// quadrature of the singular-weight and coupling integrals.

#include <functional>

#include <Eigen/Core>

#include "nehari/grid.hpp"

namespace nehari {

struct ScalarField {
  GridPtr grid;
  Eigen::VectorXd values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g);  // zeros
  ScalarField(GridPtr g, Eigen::VectorXd v);

  static ScalarField constant(GridPtr g, double c);
  // f(x) in 1D, f(x, y) in 2D; y is 0 for 1D grids.
  static ScalarField from_function(GridPtr g, const std::function<double(double, double)>& f);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
  bool all_finite() const;
  bool all_positive() const;
  double min() const { return values.minCoeff(); }
};

struct FieldPair {
  ScalarField u, v;
};

// Potentials V1, V2 >= V0 > 0 and singular weights a, b > 0.
struct CoefficientFields {
  ScalarField V1, V2, a, b;
};

struct PairSummary {
  double A = 0.0;
  double B = 0.0;
  double P = 0.0;
  double Q = 0.0;
};

struct SummaryParams {
  double p = 0.5;
  double q = 0.5;
  double alpha = 2.0;
  double beta = 2.0;
  double frac_constant = 1.0;
};

// Throws PreconditionError unless both fields live on the same grid.
void require_same_grid(const ScalarField& a, const ScalarField& b);

double seminorm_sq(const ScalarField& u);
ScalarField apply_frac(const ScalarField& u);

// Rectangle-rule integral and L2 pairing.
double integrate(const ScalarField& u);
double inner(const ScalarField& u, const ScalarField& v);

// [u]^2 + [v]^2 scaled by frac_constant, plus int V1 u^2 + int V2 v^2.
double x_norm_sq(const ScalarField& u, const ScalarField& v, const CoefficientFields& coeff,
                 double frac_constant = 1.0);
double x_inner(const FieldPair& z, const FieldPair& phi, const CoefficientFields& coeff,
               double frac_constant = 1.0);

// int w |u|^r.
double singular_weight_integral(const ScalarField& u, const ScalarField& w, double r);
// int |u|^alpha |v|^beta.
double coupling_integral(const ScalarField& u, const ScalarField& v, double alpha, double beta);
// (int |u|^r)^{1/r}.
double lp_norm(const ScalarField& u, double r);

PairSummary summarize(const ScalarField& u, const ScalarField& v, const CoefficientFields& coeff,
                      const SummaryParams& params);

}  // namespace nehari
