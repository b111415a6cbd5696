#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nehari/error.hpp"
#include "nehari/extremal.hpp"
#include "nehari/suite.hpp"

using namespace nehari;
using namespace nehari::test;
using doctest::Approx;

namespace {

// Lambda_n and Lambda_e of the constant pair on the reference problem
// (A, B, C, D) = (4 pi, 2 pi, 2 pi, 2 pi).
constexpr double kConstLambdaN = 0.509039940061426173;
constexpr double kConstLambdaE = 0.214024930409309492;

ExtremalOptions bare() {
  ExtremalOptions o;
  o.refine = false;
  o.polish = false;
  return o;
}

}  // namespace

TEST_CASE("singleton Fourier family gives the constant pair values") {
  const Problem prob = reference_problem();
  const TrialFamily fam = TrialFamily::fourier_modes(1);
  const ExtremalEstimate star = estimate_extremal(prob, fam, ExtremalKind::star, bare());
  const ExtremalEstimate sub = estimate_extremal(prob, fam, ExtremalKind::sub, bare());
  CHECK(star.value == Approx(kConstLambdaN).epsilon(1e-10));
  CHECK(sub.value == Approx(kConstLambdaE).epsilon(1e-10));
  CHECK(sub.value < star.value);
  REQUIRE(star.members.size() == 1);
  CHECK(star.best_member == 0);
  CHECK(x_norm_sq(star.argmin.u, star.argmin.v, prob.coeff) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enlarging the family does not raise the estimate") {
  const Problem prob = reference_problem();
  const double single = estimate_extremal(prob, TrialFamily::fourier_modes(1), ExtremalKind::star, bare()).value;
  ExtremalOptions refine;
  refine.polish = false;
  refine.restarts = 2;
  const ExtremalEstimate wide = estimate_extremal(prob, TrialFamily::fourier_modes(4), ExtremalKind::star, refine);
  CHECK(wide.value <= single + 1e-12);
  CHECK(wide.members.size() == 4);
}

TEST_CASE("lambda_of is zero-homogeneous") {
  const Problem prob = reference_problem();
  CounterRng rng(31, 0);
  for (int i = 0; i < 20; ++i) {
    const FieldPair z = random_positive_pair(prob, rng);
    const double c = rng.log_uniform(1e-3, 1e3);
    const FieldPair cz{ScalarField(prob.grid, c * z.u.values), ScalarField(prob.grid, c * z.v.values)};
    for (FiberKind k : {FiberKind::nehari, FiberKind::energy})
      CHECK(lambda_of(prob, cz, k) == Approx(lambda_of(prob, z, k)).epsilon(1e-10));
    CHECK(lambda_of(prob, z, FiberKind::energy) < lambda_of(prob, z, FiberKind::nehari));
  }
  CHECK(lambda_of(prob, constant_pair(prob), FiberKind::nehari) == Approx(kConstLambdaN).epsilon(1e-12));
}

TEST_CASE("embedding constant lower bound examples") {
  const Problem prob = reference_problem();
  const FieldPair s3{ScalarField::from_function(prob.grid, [](double x, double) { return std::sin(3 * x); }),
                     ScalarField(prob.grid)};
  // (3 pi / 4)^{1/4} / sqrt(4 pi)
  CHECK(embedding_constant_lb(prob, 4.0, {s3}) == Approx(0.349500540737392823).epsilon(1e-12));

  // Constants: (2 |1|_r) / sqrt(2 * 2 pi) with |1|_r = (2 pi)^{1/r}.
  const double expect = 2.0 * std::pow(2 * M_PI, 0.25) / std::sqrt(4 * M_PI);
  CHECK(embedding_constant_lb(prob, 4.0, {constant_pair(prob)}) == Approx(expect).epsilon(1e-12));
  CHECK(embedding_constant_lb(prob, 2.0, {constant_pair(prob)}) == Approx(std::sqrt(2.0)).epsilon(1e-12));

  const double one = embedding_constant_lb(prob, 4.0, {s3});
  const double two = embedding_constant_lb(prob, 4.0, {s3, constant_pair(prob)});
  CHECK(two >= one);
  CHECK_THROWS_AS(embedding_constant_lb(prob, 4.0, {}), PreconditionError);
}

TEST_CASE("certified embedding constant dominates sampled values") {
  const RunConfig cfg = default_run_config();
  const Problem prob = Problem::build(cfg.problem);
  const double r = cfg.problem.eta();
  const double cert = embedding_constant_certified(prob, r);
  CounterRng rng(32, 0);
  std::vector<FieldPair> pairs;
  for (int i = 0; i < 20; ++i) pairs.push_back(random_positive_pair(prob, rng));
  CHECK(embedding_constant_lb(prob, r, pairs) <= cert);
  CHECK(std::isfinite(cert));
}

TEST_CASE("diagnostic bounds at S = 1") {
  const Problem prob = reference_problem();
  const DiagnosticBounds d = diagnostic_bounds(prob, 1.0);
  CHECK(d.f_p == Approx(3.0 / 7.0));
  CHECK(d.rho_tilde == Approx(std::sqrt(3.0 / 7.0)).epsilon(1e-14));
  CHECK(d.norm_floor == Approx(std::sqrt(3.0 / 7.0)).epsilon(1e-14));
  CHECK(d.rho == Approx(9.0 / 49.0).epsilon(1e-14));
  CHECK(d.delta_C == Approx(9.0 / 49.0).epsilon(1e-14));
  const double c_rho = (4.0 / 7.0) / (2.0 * std::pow(2 * M_PI, 0.75)) * std::pow(3.0 / 7.0, 0.75);
  CHECK(d.C_rho == Approx(c_rho).epsilon(1e-12));

  Problem scaled = prob;
  scaled.cfg.theta = 4.0;
  CHECK(diagnostic_bounds(scaled, 1.0).rho_tilde == Approx(d.rho_tilde * 0.5).epsilon(1e-14));
  CHECK(diagnostic_bounds(prob, 2.0).rho_tilde < d.rho_tilde);
  CHECK_THROWS_AS(diagnostic_bounds(prob, 0.0), PreconditionError);
}

TEST_CASE("family descriptors and kinds") {
  CHECK(family_kind_from("fourier") == FamilyKind::fourier_modes);
  CHECK(family_kind_from("gaussian") == FamilyKind::gaussian_bumps);
  CHECK(to_string(ExtremalKind::sub) == "sub");
  CHECK(fiber_kind(ExtremalKind::star) == FiberKind::nehari);
  CHECK_FALSE(TrialFamily::gaussian_bumps(3).descriptor().empty());
}
