#pragma once

#include <cmath>

#include "nehari/config.hpp"
#include "nehari/problem.hpp"

namespace nehari::test {

// Constant coefficients V = a = b = 1 on [-pi, pi) with p = q = 0.5,
// alpha = beta = 2, theta = 1 (s = 1/2 in one dimension, outside (P)).
inline Problem reference_problem(int n = 128, double s = 0.5) {
  ProblemConfig cfg;
  cfg.grid = {1, M_PI, n, s};
  auto grid = Grid::make(cfg.grid);
  const ScalarField one = ScalarField::constant(grid, 1.0);
  return Problem::assemble(cfg, CoefficientFields{one, one, one, one});
}

inline FieldPair constant_pair(const Problem& prob, double cu = 1.0, double cv = 1.0) {
  return {ScalarField::constant(prob.grid, cu), ScalarField::constant(prob.grid, cv)};
}

inline RunConfig default_run_config() {
  return load_config(std::string(NEHARI_SOURCE_DIR) + "/configs/default.cfg");
}

}  // namespace nehari::test
