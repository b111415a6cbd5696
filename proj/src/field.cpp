#include "nehari/field.hpp"

#include <cmath>

#include "nehari/error.hpp"

namespace nehari {

ScalarField::ScalarField(GridPtr g) : grid(std::move(g)) {
  if (!grid) throw PreconditionError("field needs a grid");
  values.setZero(static_cast<Eigen::Index>(grid->size()));
}

ScalarField::ScalarField(GridPtr g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw PreconditionError("field needs a grid");
  if (static_cast<std::size_t>(values.size()) != grid->size())
    throw PreconditionError("field length does not match its grid");
}

ScalarField ScalarField::constant(GridPtr g, double c) {
  ScalarField f(std::move(g));
  f.values.setConstant(c);
  return f;
}

ScalarField ScalarField::from_function(GridPtr g, const std::function<double(double, double)>& f) {
  ScalarField out(std::move(g));
  const auto& x = out.grid->x();
  const auto& y = out.grid->y();
  for (Eigen::Index i = 0; i < out.values.size(); ++i) out.values[i] = f(x[i], y[i]);
  return out;
}

bool ScalarField::all_finite() const { return values.allFinite(); }

bool ScalarField::all_positive() const { return values.size() > 0 && values.minCoeff() > 0.0; }

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!a.grid || !b.grid) throw PreconditionError("field without a grid");
  if (a.grid != b.grid && !(a.grid->spec() == b.grid->spec()))
    throw PreconditionError("fields live on different grids");
}

double seminorm_sq(const ScalarField& u) {
  return std::max(0.0, u.grid->spectral_seminorm_sq(u.values.data()));
}

ScalarField apply_frac(const ScalarField& u) {
  ScalarField out(u.grid);
  u.grid->apply_symbol(u.values.data(), out.values.data(), 1.0, 0.0);
  return out;
}

double integrate(const ScalarField& u) { return u.values.sum() * u.grid->cell_volume(); }

double inner(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u, v);
  return u.values.dot(v.values) * u.grid->cell_volume();
}

double x_norm_sq(const ScalarField& u, const ScalarField& v, const CoefficientFields& coeff,
                 double frac_constant) {
  require_same_grid(u, v);
  require_same_grid(u, coeff.V1);
  require_same_grid(u, coeff.V2);
  const double h = u.grid->cell_volume();
  const double pot = (coeff.V1.values.array() * u.values.array().square()).sum() +
                     (coeff.V2.values.array() * v.values.array().square()).sum();
  return frac_constant * (seminorm_sq(u) + seminorm_sq(v)) + pot * h;
}

double x_inner(const FieldPair& z, const FieldPair& phi, const CoefficientFields& coeff,
               double frac_constant) {
  require_same_grid(z.u, phi.u);
  require_same_grid(z.v, phi.v);
  const ScalarField ku = apply_frac(z.u);
  const ScalarField kv = apply_frac(z.v);
  const double h = z.u.grid->cell_volume();
  const double frac = ku.values.dot(phi.u.values) + kv.values.dot(phi.v.values);
  const double pot = (coeff.V1.values.array() * z.u.values.array() * phi.u.values.array()).sum() +
                     (coeff.V2.values.array() * z.v.values.array() * phi.v.values.array()).sum();
  return (frac_constant * frac + pot) * h;
}

double singular_weight_integral(const ScalarField& u, const ScalarField& w, double r) {
  require_same_grid(u, w);
  return (w.values.array() * u.values.array().abs().pow(r)).sum() * u.grid->cell_volume();
}

double coupling_integral(const ScalarField& u, const ScalarField& v, double alpha, double beta) {
  require_same_grid(u, v);
  if (!(alpha > 1.0 && beta > 1.0)) throw PreconditionError("coupling exponents must exceed 1");
  return (u.values.array().abs().pow(alpha) * v.values.array().abs().pow(beta)).sum() *
         u.grid->cell_volume();
}

double lp_norm(const ScalarField& u, double r) {
  if (!(r >= 1.0)) throw PreconditionError("lp_norm needs r >= 1");
  return std::pow(u.values.array().abs().pow(r).sum() * u.grid->cell_volume(), 1.0 / r);
}

PairSummary summarize(const ScalarField& u, const ScalarField& v, const CoefficientFields& coeff,
                      const SummaryParams& params) {
  PairSummary s;
  s.A = x_norm_sq(u, v, coeff, params.frac_constant);
  s.B = coupling_integral(u, v, params.alpha, params.beta);
  s.P = singular_weight_integral(u, coeff.a, 1.0 - params.p);
  s.Q = singular_weight_integral(v, coeff.b, 1.0 - params.q);
  return s;
}

}  // namespace nehari
