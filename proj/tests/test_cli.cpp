#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "nehari_cli_test";
const std::string kDefault = std::string(NEHARI_SOURCE_DIR) + "/configs/default.cfg";

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + NEHARI_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path config_with(const std::string& name, const std::string& extra) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream(p) << slurp(kDefault) << extra;
  return p;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run("") == 2);
  CHECK(run("fiber") == 2);
  CHECK(run("bogus --config " + kDefault) == 2);
  CHECK(run("fiber --config " + kDefault + " --format xml") == 2);
  CHECK(run("fiber --config /nonexistent.cfg") == 2);
  CHECK(run("fiber --config " + config_with("unknown.cfg", "problem.colour = red\n").string()) == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("violated hypotheses exit 3") {
  std::string text = slurp(kDefault);
  text.replace(text.find("problem.p = 0.3"), 15, "problem.p = 1.2");
  fs::create_directories(kWork);
  const fs::path bad = kWork / "bad_p.cfg";
  std::ofstream(bad) << text;
  CHECK(run("fiber --config " + bad.string() + " --out " + (kWork / "o3").string()) == 3);
}

TEST_CASE("numeric failure exits 4") {
  CHECK(run("solve --config " + kDefault + " --lambda 5 --out " + (kWork / "o4").string()) == 4);
}

TEST_CASE("unwritable output exits 5") {
  CHECK(run("fiber --config " + kDefault + " --out /proc/nehari_no_such_dir") == 5);
}

TEST_CASE("fiber writes one CSV row per level") {
  std::string text = slurp(kDefault);
  text.replace(text.find("fiber.levels = 0.1"), 18, "fiber.levels = 0.05, 0.1, 1.0");
  const fs::path cfg = kWork / "levels.cfg";
  fs::create_directories(kWork);
  std::ofstream(cfg) << text;
  const fs::path out = kWork / "fiber_csv";
  REQUIRE(run("fiber --config " + cfg.string() + " --format csv --out " + out.string()) == 0);
  const std::string csv = slurp(out / "fiber.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find(",empty\n") != std::string::npos);

  const fs::path jout = kWork / "fiber_json";
  REQUIRE(run("fiber --config " + kDefault + " --lambda 0.12 --out " + jout.string()) == 0);
  const auto doc = nlohmann::json::parse(slurp(jout / "fiber.json"));
  REQUIRE(doc["levels"].size() == 1);
  CHECK(doc["levels"][0]["lambda"].get<double>() == 0.12);
  CHECK(doc["closed_forms"].is_object());
}

TEST_CASE("solve writes reports and fields") {
  const fs::path out = kWork / "solve";
  REQUIRE(run("solve --config " + kDefault + " --branch minus --out " + out.string()) == 0);
  const auto doc = nlohmann::json::parse(slurp(out / "solve.json"));
  REQUIRE(doc["solutions"].size() == 1);
  CHECK(doc["solutions"][0]["class"] == "minus");
  CHECK(fs::exists(out / "solution_minus_u.bin"));
  CHECK(fs::exists(out / "solution_minus_v.json"));
  CHECK_FALSE(fs::exists(out / "solution_plus_u.bin"));
}

TEST_CASE("cleanup") { fs::remove_all(kWork); }
