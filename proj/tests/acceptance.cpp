// Acceptance run: criteria 1-10 through the invariant suite on the default
// config, criterion 11 through two `nehari verify` runs. One line per
// criterion; nonzero exit when any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "nehari/config.hpp"
#include "nehari/report.hpp"
#include "nehari/suite.hpp"

namespace fs = std::filesystem;
using namespace nehari;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

Outcome summarize_checks(const std::vector<SuiteCheck>& checks) {
  Outcome o;
  o.passed = all_passed(checks);
  int failed = 0;
  std::string first;
  for (const auto& c : checks)
    if (!c.passed && failed++ == 0) first = c.name + (c.detail.empty() ? "" : " (" + c.detail + ")");
  o.detail = std::to_string(checks.size()) + " checks";
  if (failed) o.detail += ", " + std::to_string(failed) + " failed, first: " + first;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_verify(const fs::path& out) {
  const std::string cmd = std::string("\"") + NEHARI_CLI + "\" verify --config \"" + NEHARI_SOURCE_DIR +
                          "/configs/default.cfg\" --out \"" + out.string() + "\" >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "nehari_acceptance";
  fs::remove_all(root);
  const fs::path a = root / "a", b = root / "b";
  const int ea = run_verify(a), eb = run_verify(b);
  Outcome o;
  if (ea != 0 || eb != 0) {
    o.detail = "exit codes " + std::to_string(ea) + ", " + std::to_string(eb);
    return o;
  }
  std::set<std::string> names;
  for (const fs::path& dir : {a, b})
    for (const auto& e : fs::recursive_directory_iterator(dir))
      if (e.is_regular_file()) names.insert(fs::relative(e.path(), dir).string());
  int differing = 0;
  for (const auto& n : names)
    if (!fs::exists(a / n) || !fs::exists(b / n) || slurp(a / n) != slurp(b / n)) ++differing;
  o.passed = !names.empty() && differing == 0;
  o.detail = std::to_string(names.size()) + " files, " + std::to_string(differing) + " differ";
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const RunConfig cfg = load_config(std::string(NEHARI_SOURCE_DIR) + "/configs/default.cfg");
  InvariantSuite suite(cfg);

  using Group = std::vector<SuiteCheck> (InvariantSuite::*)();
  const std::vector<std::pair<const char*, Group>> groups{
      {"closed-form oracle", &InvariantSuite::closed_forms},
      {"difference identity", &InvariantSuite::difference_identity},
      {"unique maximum", &InvariantSuite::unique_maximum},
      {"derivative relations", &InvariantSuite::derivative_relations},
      {"sign equivalences", &InvariantSuite::sign_equivalences},
      {"spectral operator", &InvariantSuite::spectral},
      {"extremal ordering", &InvariantSuite::extremal_ordering},
      {"two solutions", &InvariantSuite::two_solutions},
      {"monotone continuation", &InvariantSuite::continuation},
      {"floors and sandwich", &InvariantSuite::floors_and_sandwich},
  };

  int failures = 0;
  auto report = [&](int k, const char* name, const Outcome& o) {
    std::printf("criterion %2d  %-22s %s  %s\n", k, name, o.passed ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
  };

  int k = 0;
  for (const auto& [name, fn] : groups) report(++k, name, summarize_checks((suite.*fn)()));
  report(11, "determinism", determinism());

  std::cout << "estimates " << suite.estimates_json().dump() << "\n";
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
