#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nehari/energy.hpp"
#include "nehari/error.hpp"
#include "nehari/suite.hpp"

using namespace nehari;
using namespace nehari::test;
using doctest::Approx;

TEST_CASE("breakdown of the constant pair") {
  const Problem prob = reference_problem();
  const FieldPair z = constant_pair(prob);
  const EnergyBreakdown e = breakdown(prob, z, 0.1);
  CHECK(e.energy == Approx(0.7 * M_PI).epsilon(1e-12));
  CHECK(e.d1 == Approx(1.6 * M_PI).epsilon(1e-12));
  CHECK(e.d2 == Approx(-0.2 * M_PI).epsilon(1e-12));

  const EnergyBreakdown at_half = breakdown(prob, z, 0.5);
  CHECK(std::abs(at_half.d1) < 1e-10);

  const FieldPair off_a{ScalarField::constant(prob.grid, 1.0), ScalarField(prob.grid)};
  const EnergyBreakdown e0 = breakdown(prob, off_a, 0.1);
  CHECK(std::isfinite(e0.energy));
  CHECK(e0.summary.B == 0.0);
}

TEST_CASE("energy recomputes from the summary") {
  const Problem prob = reference_problem();
  const FieldPair z{ScalarField::from_function(prob.grid, [](double x, double) { return 1.2 + std::cos(x); }),
                    ScalarField::from_function(prob.grid, [](double x, double) { return 0.7 + 0.3 * std::sin(2 * x); })};
  const EnergyBreakdown e = breakdown(prob, z, 0.37);
  const auto& s = e.summary;
  const double expect = 0.5 * s.A - 0.37 * s.P / 0.5 - 0.37 * s.Q / 0.5 - s.B / 4.0;
  CHECK(e.energy == Approx(expect).epsilon(1e-12));
}

TEST_CASE("rayleigh quotients") {
  const Problem prob = reference_problem();
  const FieldPair z = constant_pair(prob);
  CHECK(rayleigh(prob, z, FiberKind::nehari) == Approx(0.5).epsilon(1e-13));
  CHECK(rayleigh(prob, z, FiberKind::energy) == Approx(0.1875).epsilon(1e-13));
  const FieldPair b0{ScalarField::constant(prob.grid, 1.0), ScalarField(prob.grid)};
  CHECK(rayleigh(prob, b0, FiberKind::nehari) == Approx(2 * M_PI / (2 * M_PI)));
  const FieldPair zero{ScalarField(prob.grid), ScalarField(prob.grid)};
  CHECK_THROWS_AS(rayleigh(prob, zero, FiberKind::nehari), DomainError);
}

TEST_CASE("fiber coefficients bridge to rayleigh") {
  const Problem prob = reference_problem();
  const FieldPair z = constant_pair(prob);
  const FiberCoefficients c = fiber_coefficients(prob, z);
  CHECK(c.A == Approx(4 * M_PI));
  CHECK(c.B == Approx(2 * M_PI));
  CHECK(c.C == Approx(2 * M_PI));
  CHECK(c.D == Approx(2 * M_PI));

  CounterRng rng(21, 0);
  const FieldPair w = random_positive_pair(prob, rng);
  const FiberCoefficients cw = fiber_coefficients(prob, w);
  for (double t : {0.05, 0.6, 1.0, 3.0, 40.0}) {
    const FieldPair tw{ScalarField(prob.grid, t * w.u.values), ScalarField(prob.grid, t * w.v.values)};
    CHECK(eval_fiber(cw, t, FiberKind::nehari) == Approx(rayleigh(prob, tw, FiberKind::nehari)).epsilon(1e-12));
    CHECK(eval_fiber(cw, t, FiberKind::energy) == Approx(rayleigh(prob, tw, FiberKind::energy)).epsilon(1e-12));
  }
  const FieldPair b0{ScalarField::constant(prob.grid, 1.0), ScalarField(prob.grid)};
  CHECK_THROWS_AS(fiber_coefficients(prob, b0), DomainError);
}

TEST_CASE("classification examples") {
  const Problem prob = reference_problem();
  const FieldPair z = constant_pair(prob);
  const NehariClass minus = classify(prob, z, 0.5);
  CHECK(minus.tag == NehariTag::minus);
  CHECK(breakdown(prob, z, 0.5).d2 == Approx(-M_PI).epsilon(1e-12));

  const double tp = roots_at_level(fiber_coefficients(prob, z), 0.3).t_plus;
  const FieldPair zp = constant_pair(prob, tp, tp);
  CHECK(classify(prob, zp, 0.3).tag == NehariTag::plus);

  CHECK(classify(prob, z, 0.1).tag == NehariTag::off);
  CHECK(to_string(NehariTag::zero) == "zero");
}

TEST_CASE("classification at the degenerate scale is Zero") {
  const Problem prob = reference_problem();
  const FieldPair z = constant_pair(prob);
  const FiberCoefficients c = fiber_coefficients(prob, z);
  const double tn = critical_point(c, FiberKind::nehari);
  const FieldPair zn = constant_pair(prob, tn, tn);
  CHECK(classify(prob, zn, lambda_peak(c, FiberKind::nehari)).tag == NehariTag::zero);
}

TEST_CASE("weak residual") {
  const Problem prob = reference_problem();
  const FieldPair z{ScalarField::from_function(prob.grid, [](double x, double) { return 1.5 + std::cos(x); }),
                    ScalarField::from_function(prob.grid, [](double x, double) { return 1.1 + 0.5 * std::sin(3 * x); })};
  const FieldPair zero{ScalarField(prob.grid), ScalarField(prob.grid)};
  CHECK(weak_residual(prob, z, zero, 0.2) == 0.0);
  CHECK(weak_residual(prob, z, z, 0.2) == Approx(breakdown(prob, z, 0.2).d1).epsilon(1e-12));

  FieldPair bad = z;
  bad.u.values[5] = 0.0;
  CHECK_THROWS_AS(weak_residual(prob, bad, z, 0.2), SingularityError);
}

TEST_CASE("energy gradient matches directional differences") {
  ProblemConfig cfg = test::default_run_config().problem;
  const Problem prob = Problem::build(cfg);
  CounterRng rng(22, 0);
  const FieldPair z = random_positive_pair(prob, rng);
  const auto battery = test_battery(prob, 8, 4, 1, 2);
  const double lambda = 0.3;
  for (const FieldPair& phi : battery) {
    const double h = 1e-6;
    const auto shifted = [&](double s) {
      return FieldPair{ScalarField(prob.grid, z.u.values + s * phi.u.values),
                       ScalarField(prob.grid, z.v.values + s * phi.v.values)};
    };
    const double fd = (breakdown(prob, shifted(h), lambda).energy - breakdown(prob, shifted(-h), lambda).energy) / (2 * h);
    const double an = weak_residual(prob, z, phi, lambda);
    CHECK(std::abs(fd - an) <= 1e-6 * (1.0 + std::abs(an)));
  }
}

TEST_CASE("test battery layout and determinism") {
  const Problem prob = reference_problem();
  const auto a = test_battery(prob, 64, 16, 9, 1);
  const auto b = test_battery(prob, 64, 16, 9, 1);
  REQUIRE(a.size() == 64);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].u.values == b[i].u.values);
    CHECK(a[i].v.values == b[i].v.values);
  }
  // Modes alternate between the two components.
  CHECK(a[0].v.values.isZero());
  CHECK(a[1].u.values.isZero());
  CHECK_FALSE(a[63].u.values.isZero());
  CHECK_FALSE(a[63].v.values.isZero());
  const auto c = test_battery(prob, 64, 16, 10, 1);
  CHECK(c[63].u.values != a[63].u.values);
  CHECK_THROWS_AS(test_battery(prob, 4, 8, 0, 0), PreconditionError);
}
