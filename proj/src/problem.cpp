#include "nehari/problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nehari/error.hpp"

namespace nehari {
namespace {

double radius_sq(double x, double y) { return x * x + y * y; }

void require(bool ok, const char* hypothesis, const std::string& what) {
  if (!ok) throw ValidationError(hypothesis, what);
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void validate_fields(const ProblemConfig& cfg, const CoefficientFields& c) {
  require(c.a.all_finite() && c.a.all_positive(), "(P_0)", "weight a must be positive at every node");
  require(c.b.all_finite() && c.b.all_positive(), "(P_0)", "weight b must be positive at every node");
  require(c.V1.all_finite() && c.V1.min() > 0.0, "(V_0)",
          "V1 must be bounded below by a positive constant, min = " + num(c.V1.min()));
  require(c.V2.all_finite() && c.V2.min() > 0.0, "(V_0)",
          "V2 must be bounded below by a positive constant, min = " + num(c.V2.min()));
  for (const ScalarField* f : {&c.V1, &c.V2, &c.a, &c.b}) {
    if (!f->grid || !(f->grid->spec() == cfg.grid))
      throw PreconditionError("coefficient field grid does not match the configured grid");
  }
}

}  // namespace

std::string_view to_string(PotentialKind k) noexcept {
  return k == PotentialKind::constant ? "constant" : "harmonic";
}

std::string_view to_string(WeightKind k) noexcept {
  switch (k) {
    case WeightKind::constant: return "constant";
    case WeightKind::gaussian: return "gaussian";
    case WeightKind::lorentzian: return "lorentzian";
  }
  return "gaussian";
}

PotentialKind potential_kind_from(std::string_view s) {
  if (s == "constant") return PotentialKind::constant;
  if (s == "harmonic") return PotentialKind::harmonic;
  throw PreconditionError("unknown potential kind '" + std::string(s) + "'");
}

WeightKind weight_kind_from(std::string_view s) {
  if (s == "constant") return WeightKind::constant;
  if (s == "gaussian") return WeightKind::gaussian;
  if (s == "lorentzian") return WeightKind::lorentzian;
  throw PreconditionError("unknown weight kind '" + std::string(s) + "'");
}

double ProblemConfig::critical_exponent() const noexcept {
  const double n = grid.dim;
  if (n <= 2.0 * grid.s) return std::numeric_limits<double>::infinity();
  return 2.0 * n / (n - 2.0 * grid.s);
}

void ProblemConfig::validate() const {
  grid.validate();
  const double finite_check[] = {p, q, alpha, beta, theta, lambda, frac_norm_constant, floor};
  for (double v : finite_check) {
    if (!std::isfinite(v)) throw ValidationError("(P)", "all problem parameters must be finite");
  }
  require(p > 0.0 && p <= q && q < 1.0, "(P)",
          "need 0 < p <= q < 1, got p = " + num(p) + ", q = " + num(q));
  require(alpha > 1.0 && beta > 1.0, "(P)",
          "need alpha, beta > 1, got alpha = " + num(alpha) + ", beta = " + num(beta));
  require(grid.dim > 2.0 * grid.s, "(P)",
          "need N > 2s, got N = " + std::to_string(grid.dim) + ", s = " + num(grid.s));
  require(eta() > 2.0 && eta() < critical_exponent(), "(P)",
          "need 2 < alpha + beta < 2*_s = " + num(critical_exponent()) + ", got " + num(eta()));
  require(theta > 0.0, "(P)", "need theta > 0");
  require(lambda > 0.0, "(P)", "need lambda > 0");
  if (!(frac_norm_constant > 0.0)) throw PreconditionError("frac_norm_constant must be positive");
  if (!(floor > 0.0)) throw PreconditionError("floor must be positive");

  for (const PotentialSpec* v : {&V1, &V2}) {
    require(v->v0 > 0.0, "(V_0)", "potential offset v0 must be positive, got " + num(v->v0));
    require(v->strength >= 0.0, "(V_0)", "potential strength must be nonnegative");
  }
  for (const WeightSpec* w : {&a, &b}) {
    require(w->amplitude > 0.0, "(P_0)", "weight amplitude must be positive");
    require(w->kind == WeightKind::constant || w->width > 0.0, "(P_0)",
            "weight width must be positive");
  }
}

ScalarField make_potential(const GridPtr& grid, const PotentialSpec& spec) {
  const double strength = spec.kind == PotentialKind::harmonic ? spec.strength : 0.0;
  return ScalarField::from_function(
      grid, [&](double x, double y) { return spec.v0 + strength * radius_sq(x, y); });
}

ScalarField make_weight(const GridPtr& grid, const WeightSpec& spec) {
  return ScalarField::from_function(grid, [&](double x, double y) {
    const double r2 = radius_sq(x, y);
    switch (spec.kind) {
      case WeightKind::constant: return spec.amplitude;
      case WeightKind::gaussian: return spec.amplitude * std::exp(-r2 / (2.0 * spec.width * spec.width));
      case WeightKind::lorentzian: return spec.amplitude / (1.0 + r2 / (spec.width * spec.width));
    }
    return spec.amplitude;
  });
}

Problem Problem::build(const ProblemConfig& cfg) {
  cfg.validate();
  const GridPtr grid = Grid::make(cfg.grid);
  CoefficientFields c{make_potential(grid, cfg.V1), make_potential(grid, cfg.V2),
                      make_weight(grid, cfg.a), make_weight(grid, cfg.b)};
  return build(cfg, c);
}

Problem Problem::build(const ProblemConfig& cfg, const CoefficientFields& coeff) {
  cfg.validate();
  validate_fields(cfg, coeff);
  return assemble(cfg, coeff);
}

Problem Problem::assemble(const ProblemConfig& cfg, const CoefficientFields& coeff) {
  for (const ScalarField* f : {&coeff.V1, &coeff.V2, &coeff.a, &coeff.b}) {
    if (!f->grid || !(f->grid->spec() == cfg.grid))
      throw PreconditionError("coefficient field grid does not match the configured grid");
  }
  Problem prob;
  prob.cfg = cfg;
  prob.grid = coeff.V1.grid;
  prob.coeff = coeff;
  prob.v_min = std::min(coeff.V1.min(), coeff.V2.min());
  return prob;
}

FiberCoefficients Problem::fiber(const PairSummary& s) const {
  FiberCoefficients c;
  c.A = s.A;
  c.B = s.B;
  c.C = s.P;
  c.D = s.Q;
  c.p = cfg.p;
  c.q = cfg.q;
  c.alpha = cfg.alpha;
  c.beta = cfg.beta;
  c.theta = cfg.theta;
  return c;
}

}  // namespace nehari
