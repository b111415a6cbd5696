#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "nehari/error.hpp"
#include "nehari/field_io.hpp"
#include "nehari/rng.hpp"

using namespace nehari;
using doctest::Approx;

namespace {

GridPtr pi_grid(int n = 128, double s = 0.5, int dim = 1) { return Grid::make({dim, M_PI, n, s}); }

ScalarField f_of(const GridPtr& g, double (*f)(double)) {
  return ScalarField::from_function(g, [f](double x, double) { return f(x); });
}

CoefficientFields unit_coeff(const GridPtr& g) {
  const ScalarField one = ScalarField::constant(g, 1.0);
  return {one, one, one, one};
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS(GridSpec({3, 1.0, 16, 0.5}).validate(), PreconditionError);
  CHECK_THROWS_AS(GridSpec({1, 1.0, 24, 0.5}).validate(), PreconditionError);
  CHECK_THROWS_AS(GridSpec({1, 1.0, 8, 0.5}).validate(), PreconditionError);
  CHECK_THROWS_AS(GridSpec({1, -1.0, 16, 0.5}).validate(), PreconditionError);
  CHECK_THROWS_AS(GridSpec({1, 1.0, 16, 1.0}).validate(), PreconditionError);
  GridSpec g{2, 2.0, 32, 0.3};
  CHECK(g.size() == 1024);
  CHECK(g.spacing() == Approx(0.125));
  CHECK(g.box_volume() == Approx(16.0));
}

TEST_CASE("seminorm examples") {
  const GridPtr g = pi_grid();
  CHECK(std::abs(seminorm_sq(ScalarField::constant(g, 3.0))) < 1e-20);
  CHECK(seminorm_sq(f_of(g, [](double x) { return std::sin(3 * x); })) == Approx(3 * M_PI).epsilon(1e-12));
  CHECK(seminorm_sq(f_of(g, [](double x) { return std::sin(2 * x) + std::sin(5 * x); })) ==
        Approx(7 * M_PI).epsilon(1e-12));
}

TEST_CASE("apply_frac eigenfunctions") {
  const GridPtr g = pi_grid();
  const ScalarField u = f_of(g, [](double x) { return std::sin(3 * x); });
  CHECK((apply_frac(u).values - 3.0 * u.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(apply_frac(ScalarField::constant(g, 1.0)).values.cwiseAbs().maxCoeff() < 1e-14);

  const GridPtr g4 = pi_grid(128, 0.25);
  const ScalarField w = f_of(g4, [](double x) { return std::cos(4 * x); });
  CHECK((apply_frac(w).values - 2.0 * w.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("apply_frac in two dimensions") {
  const GridPtr g = pi_grid(32, 0.5, 2);
  const ScalarField u =
      ScalarField::from_function(g, [](double x, double y) { return std::cos(2 * x) * std::sin(3 * y); });
  CHECK((apply_frac(u).values - std::sqrt(13.0) * u.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(seminorm_sq(u) == Approx(std::sqrt(13.0) * M_PI * M_PI).epsilon(1e-12));
}

TEST_CASE("self-adjointness and seminorm consistency") {
  const GridPtr g = Grid::make({1, 10.0, 256, 0.37});
  CounterRng rng(3, 0);
  for (int i = 0; i < 10; ++i) {
    ScalarField u(g), v(g);
    for (Eigen::Index k = 0; k < u.values.size(); ++k) {
      u.values[k] = rng.normal();
      v.values[k] = rng.normal();
    }
    const double lhs = inner(apply_frac(u), v), rhs = inner(u, apply_frac(v));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::sqrt(inner(u, u) * inner(v, v)));
    CHECK(inner(apply_frac(u), u) == Approx(seminorm_sq(u)).epsilon(1e-10));
  }
}

TEST_CASE("x_norm examples") {
  const GridPtr g = pi_grid();
  const CoefficientFields c = unit_coeff(g);
  const ScalarField s3 = f_of(g, [](double x) { return std::sin(3 * x); });
  const ScalarField zero(g), one = ScalarField::constant(g, 1.0);
  CHECK(x_norm_sq(s3, zero, c) == Approx(4 * M_PI).epsilon(1e-12));
  CHECK(x_norm_sq(one, one, c) == Approx(4 * M_PI).epsilon(1e-12));
  CHECK(x_norm_sq(s3, s3, c) == Approx(8 * M_PI).epsilon(1e-12));
  CHECK(x_norm_sq(s3, zero, c, 2.0) == Approx(7 * M_PI).epsilon(1e-12));
  CHECK_THROWS_AS(x_norm_sq(s3, ScalarField(pi_grid(64)), c), PreconditionError);
}

TEST_CASE("singular weight integral examples") {
  const GridPtr g = pi_grid();
  const ScalarField one = ScalarField::constant(g, 1.0);
  CHECK(singular_weight_integral(one, one, 0.5) == Approx(2 * M_PI).epsilon(1e-14));
  CHECK(singular_weight_integral(ScalarField::constant(g, 4.0), one, 0.5) == Approx(4 * M_PI).epsilon(1e-14));
  const GridPtr wide = Grid::make({1, 10.0, 1024, 0.5});
  const ScalarField w = ScalarField::from_function(wide, [](double x, double) { return std::exp(-x * x); });
  CHECK(singular_weight_integral(ScalarField::constant(wide, 1.0), w, 0.9) ==
        Approx(std::sqrt(M_PI)).epsilon(1e-12));
  // |u| is used, so signs do not matter.
  CHECK(singular_weight_integral(ScalarField::constant(g, -4.0), one, 0.5) == Approx(4 * M_PI));
}

TEST_CASE("coupling integral examples") {
  const GridPtr g = pi_grid();
  CHECK(coupling_integral(ScalarField::constant(g, 2.0), ScalarField::constant(g, 3.0), 2, 2) ==
        Approx(72 * M_PI).epsilon(1e-14));
  CHECK(coupling_integral(ScalarField::constant(g, 1.0), ScalarField(g), 2, 2) == 0.0);
  const GridPtr g256 = pi_grid(256);
  const ScalarField s = f_of(g256, [](double x) { return std::abs(std::sin(x)); });
  CHECK(coupling_integral(s, s, 2, 2) == Approx(0.75 * M_PI).epsilon(1e-12));
}

TEST_CASE("lp norm examples") {
  const GridPtr g = pi_grid();
  CHECK(lp_norm(ScalarField::constant(g, 1.0), 2) == Approx(std::sqrt(2 * M_PI)).epsilon(1e-14));
  const ScalarField s = f_of(g, [](double x) { return std::sin(x); });
  CHECK(lp_norm(s, 2) == Approx(std::sqrt(M_PI)).epsilon(1e-12));
  // (3 pi / 4)^{1/4}
  CHECK(lp_norm(s, 4) == Approx(1.2389471586471041).epsilon(1e-12));
}

TEST_CASE("summary and homogeneity") {
  const GridPtr g = pi_grid();
  const CoefficientFields c = unit_coeff(g);
  const SummaryParams prm{0.5, 0.5, 2, 2, 1};
  const ScalarField one = ScalarField::constant(g, 1.0);
  const PairSummary s = summarize(one, one, c, prm);
  CHECK(s.A == Approx(4 * M_PI));
  CHECK(s.B == Approx(2 * M_PI));
  CHECK(s.P == Approx(2 * M_PI));
  CHECK(s.Q == Approx(2 * M_PI));

  const ScalarField two = ScalarField::constant(g, 2.0);
  const PairSummary s2 = summarize(two, two, c, prm);
  CHECK(s2.A == Approx(16 * M_PI).epsilon(1e-13));
  CHECK(s2.B == Approx(32 * M_PI).epsilon(1e-13));
  CHECK(s2.P == Approx(std::sqrt(2.0) * 2 * M_PI).epsilon(1e-13));

  CHECK(summarize(f_of(g, [](double x) { return std::sin(3 * x); }), ScalarField(g), c, prm).B == 0.0);

  CounterRng rng(5, 0);
  const SummaryParams asym{0.3, 0.6, 1.7, 2.4, 1};
  ScalarField u(g), v(g);
  for (Eigen::Index k = 0; k < u.values.size(); ++k) {
    u.values[k] = 1.0 + 0.5 * rng.uniform();
    v.values[k] = 1.0 + 0.5 * rng.uniform();
  }
  const PairSummary base = summarize(u, v, c, asym);
  const double t = 3.7;
  const PairSummary sc =
      summarize(ScalarField(g, t * u.values), ScalarField(g, t * v.values), c, asym);
  CHECK(sc.A == Approx(t * t * base.A).epsilon(1e-12));
  CHECK(sc.B == Approx(std::pow(t, 4.1) * base.B).epsilon(1e-12));
  CHECK(sc.P == Approx(std::pow(t, 0.7) * base.P).epsilon(1e-12));
  CHECK(sc.Q == Approx(std::pow(t, 0.4) * base.Q).epsilon(1e-12));
}

TEST_CASE("quadrature converges spectrally on a Gaussian") {
  const auto err = [](int n) {
    const GridPtr g = Grid::make({1, 10.0, n, 0.5});
    return std::abs(integrate(ScalarField::from_function(g, [](double x, double) { return std::exp(-x * x); })) -
                    std::sqrt(M_PI));
  };
  CHECK(err(16) / err(32) >= 10.0);
}

TEST_CASE("field binary round trip and sidecar") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "nehari_field_io_test";
  fs::create_directories(dir);
  const GridPtr g = Grid::make({2, 3.0, 16, 0.4});
  const ScalarField u = ScalarField::from_function(g, [](double x, double y) { return std::exp(-x * x - 2 * y * y); });
  write_field_binary(dir / "u.bin", u);
  CHECK(fs::file_size(dir / "u.bin") == 32 + 8 * 256);

  const ScalarField back = read_field_binary(dir / "u.bin");
  CHECK(back.grid->spec() == g->spec());
  CHECK(back.values == u.values);
  const ScalarField onto = read_field_binary(dir / "u.bin", g);
  CHECK(onto.grid == g);
  CHECK_THROWS_AS(read_field_binary(dir / "u.bin", pi_grid(16)), PreconditionError);
  CHECK_THROWS_AS(read_field_binary(dir / "missing.bin"), IoError);

  std::ofstream(dir / "short.bin", std::ios::binary) << "abc";
  CHECK_THROWS(read_field_binary(dir / "short.bin"));

  write_field_sidecar(dir / "u.json", u, {{"source", "test"}});
  std::ifstream side(dir / "u.json");
  const std::string text((std::istreambuf_iterator<char>(side)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"nehari-field-v1\"") != std::string::npos);
  CHECK(text.find("\"source\": \"test\"") != std::string::npos);

  CHECK_THROWS_AS(write_field_csv(dir / "u.csv", u), PreconditionError);
  const GridPtr g1 = pi_grid(16);
  write_field_csv(dir / "w.csv", ScalarField::constant(g1, 2.0));
  std::ifstream csv(dir / "w.csv");
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  CHECK(header == "x,value");
  CHECK(first == "-3.141592653589793,2");
  fs::remove_all(dir);
}
