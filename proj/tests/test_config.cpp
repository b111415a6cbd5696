#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "nehari/config.hpp"
#include "nehari/error.hpp"

using namespace nehari;
using namespace nehari::test;

namespace {

std::string default_text() {
  std::ifstream in(std::string(NEHARI_SOURCE_DIR) + "/configs/default.cfg");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int error_line(const std::string& text) {
  try {
    (void)parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("default config loads and validates") {
  const RunConfig cfg = default_run_config();
  CHECK(cfg.problem.grid.points_per_axis == 128);
  CHECK(cfg.problem.p == 0.3);
  CHECK(cfg.problem.q == 0.5);
  CHECK(cfg.family.kind == FamilyKind::gaussian_bumps);
  CHECK(cfg.fiber_levels == std::vector<double>{0.1});
  CHECK(cfg.out_dir == "out");
  CHECK_NOTHROW(validate_run_config(cfg));
}

TEST_CASE("text and JSON round trips") {
  const RunConfig cfg = default_run_config();
  CHECK(parse_config_text(serialize_config(cfg)) == cfg);
  CHECK(parse_config_json(config_to_json(cfg).dump()) == cfg);

  RunConfig other = cfg;
  other.problem.a.kind = WeightKind::lorentzian;
  other.problem.V2.kind = PotentialKind::constant;
  other.fiber_levels = {0.05, 0.1, 0.2};
  other.seed = 12345678901ULL;
  CHECK(parse_config_text(serialize_config(other)) == other);
  CHECK(parse_config_json(config_to_json(other).dump()) == other);
  CHECK_FALSE(other == cfg);
}

TEST_CASE("unset keys keep defaults") {
  const RunConfig cfg = parse_config_text("grid.s = 0.4\nproblem.lambda = 0.2\n");
  CHECK(cfg.problem.lambda == 0.2);
  CHECK(cfg.sweep_points == RunConfig{}.sweep_points);
}

TEST_CASE("line-anchored text errors") {
  CHECK(error_line("grid.dim = 1\n\nproblem.colour = red\n") == 3);
  CHECK(error_line("problem.p = 0.3\nproblem.p = 0.4\n") == 2);
  CHECK(error_line("# comment\nproblem.p = abc\n") == 2);
  CHECK(error_line("grid.points = 12.5\n") == 1);
  CHECK(error_line("family.polish = maybe\n") == 1);
  CHECK(error_line("no equals sign\n") == 1);
  CHECK(error_line("problem.p =\n") == 1);
  try {
    (void)parse_config_text("problem.p = 0.3\nproblem.p = 0.4\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }
}

TEST_CASE("JSON errors") {
  CHECK_THROWS_AS(parse_config_json("{\"problem\": {\"p\": }"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("{\"problem\": {\"nope\": 1}}"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("{\"problem\": {\"p\": \"x\"}}"), ConfigError);
  const RunConfig cfg = parse_config_json("{\"grid\": {\"s\": 0.4}, \"problem\": {\"p\": 0.25}, \"fiber\": {\"levels\": [0.1, 0.2]}}");
  CHECK(cfg.problem.p == 0.25);
  CHECK(cfg.fiber_levels.size() == 2);
}

TEST_CASE("hypothesis violations raise ValidationError") {
  RunConfig cfg = parse_config_text(default_text() + "\n");
  cfg.problem.p = 1.2;
  try {
    validate_run_config(cfg);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.hypothesis() == "(P)");
    CHECK(std::string(e.what()).rfind("(P) violated:", 0) == 0);
  }
  RunConfig v = default_run_config();
  v.problem.V1.v0 = -1.0;
  v.problem.V1.strength = 0.0;
  CHECK_THROWS_AS(validate_run_config(v), ValidationError);
}

TEST_CASE("malformed settings raise ConfigError") {
  RunConfig cfg = default_run_config();
  cfg.sweep_fraction = 1.5;
  CHECK_THROWS_AS(validate_run_config(cfg), ConfigError);
  cfg = default_run_config();
  cfg.family.kind = FamilyKind::custom;
  CHECK_THROWS_AS(validate_run_config(cfg), ConfigError);
  CHECK_THROWS_AS(cfg.trial_family(), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), ConfigError);
}
