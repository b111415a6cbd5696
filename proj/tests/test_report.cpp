#include <doctest.h>

#include <cmath>
#include <limits>

#include "nehari/error.hpp"
#include "nehari/report.hpp"

using namespace nehari;

TEST_CASE("embedded schemas parse") {
  for (const char* name : {"field", "fiber", "extremal", "solve", "sweep", "verify"}) {
    CAPTURE(name);
    CHECK(schema(name).is_object());
  }
  CHECK_THROWS_AS(schema_text("nope"), PreconditionError);
}

TEST_CASE("fiber report validates against its schema") {
  const FiberCoefficients c;
  Json doc{{"command", "fiber"},
           {"coefficients", to_json(c)},
           {"critical_points", to_json(CriticalPoints{0.65, 0.93, 0.15, 0.06})},
           {"closed_forms", nullptr},
           {"levels", Json::array({to_json(0.1, roots_at_level(c, 0.1)), to_json(1.0, roots_at_level(c, 1.0))})}};
  CHECK(schema_errors(doc, schema("fiber")).empty());
  CHECK_NOTHROW(require_schema(doc, "fiber"));

  Json extra = doc;
  extra["surprise"] = 1;
  CHECK_FALSE(schema_errors(extra, schema("fiber")).empty());

  Json missing = doc;
  missing.erase("levels");
  const auto errs = schema_errors(missing, schema("fiber"));
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("levels") != std::string::npos);

  Json wrong = doc;
  wrong["coefficients"]["A"] = "one";
  CHECK_THROWS_AS(require_schema(wrong, "fiber"), Error);
}

TEST_CASE("empty level roots serialize as null") {
  const Json j = to_json(1.0, roots_at_level(FiberCoefficients{}, 1.0));
  CHECK(j["t_plus"].is_null());
  CHECK(j["empty"].get<bool>());
}

TEST_CASE("sweep rows keep non-finite values out of JSON") {
  SweepRow r;
  r.lambda = 0.2;
  r.ok_plus = true;
  r.c_plus = -1.5;
  r.residual_minus = std::numeric_limits<double>::quiet_NaN();
  r.error_minus = "did not converge";
  const Json j = to_json(r);
  CHECK(j["c_minus"].is_null());
  CHECK(j["residual_minus"].is_null());
  CHECK(j["c_plus"].get<double>() == -1.5);
}

TEST_CASE("CSV writers emit a header for empty input") {
  CHECK(sweep_csv({}) ==
        "lambda,c_plus,c_minus,e_minus_sign,iters_plus,iters_minus,residual_plus,residual_minus\n");
  CHECK(members_csv({}) == "kind,member,skipped,value\n");
  CHECK(level_roots_csv({}, {}) == "lambda,t_n,t_e,lambda_n,lambda_e,t_plus,t_minus,status\n");
}

TEST_CASE("CSV rows") {
  SweepRow r;
  r.lambda = 0.25;
  r.ok_plus = r.ok_minus = true;
  r.c_plus = -0.5;
  r.c_minus = 0.125;
  r.e_minus_sign = 1;
  r.iters_plus = 3;
  r.iters_minus = 4;
  const std::string csv = sweep_csv({r, r});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("0.25,-0.5,0.125,1,3,4,") != std::string::npos);

  const FiberCoefficients c;
  const std::string lr = level_roots_csv(CriticalPoints{}, {{1.0, roots_at_level(c, 1.0)}});
  CHECK(lr.find(",,empty\n") != std::string::npos);
}

TEST_CASE("JSON output is deterministic") {
  const Json a = to_json(FiberCoefficients{});
  const Json b = to_json(FiberCoefficients{});
  CHECK(dump_json(a) == dump_json(b));
  CHECK(dump_json(a).back() == '\n');
  CHECK(dump_json(a).find("\"A\"") < dump_json(a).find("\"eta\""));
}

TEST_CASE("output helpers raise IoError") {
  CHECK_THROWS_AS(ensure_directory("/proc/nehari_cannot_exist"), IoError);
  CHECK_THROWS_AS(write_text_file("/proc/nehari_cannot_exist/x.txt", "x"), IoError);
}
