#include "nehari/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nehari/error.hpp"
#include "nehari/format.hpp"

namespace nehari {
namespace {

using nlohmann::ordered_json;

struct BadValue {
  std::string what;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw BadValue{"expected a number, got '" + s + "'"};
  return v;
}

template <class Int>
Int to_int(const std::string& s) {
  Int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw BadValue{"expected an integer, got '" + s + "'"};
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw BadValue{"expected true or false, got '" + s + "'"};
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw BadValue{"expected a comma-separated list of numbers"};
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

template <class Fn>
auto keyword(Fn&& parse, const std::string& s) {
  try {
    return parse(s);
  } catch (const PreconditionError& e) {
    throw BadValue{e.what()};
  }
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define NEHARI_DOUBLE(KEY, FIELD)                                                    \
  Entry {                                                                            \
    KEY, [](RunConfig& c, const std::string& v) { c.FIELD = to_double(v); },         \
        [](const RunConfig& c) { return format_double(c.FIELD); }                    \
  }
#define NEHARI_INT(KEY, FIELD)                                                       \
  Entry {                                                                            \
    KEY, [](RunConfig& c, const std::string& v) { c.FIELD = to_int<int>(v); },       \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }                   \
  }
#define NEHARI_POTENTIAL(PREFIX, FIELD)                                                          \
  Entry{PREFIX ".kind",                                                                          \
        [](RunConfig& c, const std::string& v) { c.FIELD.kind = keyword(potential_kind_from, v); }, \
        [](const RunConfig& c) { return std::string(to_string(c.FIELD.kind)); }},               \
      NEHARI_DOUBLE(PREFIX ".v0", FIELD.v0), NEHARI_DOUBLE(PREFIX ".strength", FIELD.strength)
#define NEHARI_WEIGHT(PREFIX, FIELD)                                                          \
  Entry{PREFIX ".kind",                                                                       \
        [](RunConfig& c, const std::string& v) { c.FIELD.kind = keyword(weight_kind_from, v); }, \
        [](const RunConfig& c) { return std::string(to_string(c.FIELD.kind)); }},            \
      NEHARI_DOUBLE(PREFIX ".amplitude", FIELD.amplitude), NEHARI_DOUBLE(PREFIX ".width", FIELD.width)

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      NEHARI_INT("grid.dim", problem.grid.dim),
      NEHARI_DOUBLE("grid.half_width", problem.grid.half_width),
      NEHARI_INT("grid.points", problem.grid.points_per_axis),
      NEHARI_DOUBLE("grid.s", problem.grid.s),
      NEHARI_DOUBLE("problem.p", problem.p),
      NEHARI_DOUBLE("problem.q", problem.q),
      NEHARI_DOUBLE("problem.alpha", problem.alpha),
      NEHARI_DOUBLE("problem.beta", problem.beta),
      NEHARI_DOUBLE("problem.theta", problem.theta),
      NEHARI_DOUBLE("problem.lambda", problem.lambda),
      NEHARI_DOUBLE("problem.frac_norm_constant", problem.frac_norm_constant),
      NEHARI_DOUBLE("problem.floor", problem.floor),
      NEHARI_POTENTIAL("potential.v1", problem.V1),
      NEHARI_POTENTIAL("potential.v2", problem.V2),
      NEHARI_WEIGHT("weight.a", problem.a),
      NEHARI_WEIGHT("weight.b", problem.b),
      Entry{"family.kind",
            [](RunConfig& c, const std::string& v) { c.family.kind = keyword(family_kind_from, v); },
            [](const RunConfig& c) { return std::string(to_string(c.family.kind)); }},
      NEHARI_INT("family.count", family.count),
      NEHARI_INT("family.restarts", family.restarts),
      Entry{"family.polish", [](RunConfig& c, const std::string& v) { c.family.polish = to_bool(v); },
            [](const RunConfig& c) { return std::string(c.family.polish ? "true" : "false"); }},
      NEHARI_DOUBLE("solver.tol_energy", solver.tol_energy),
      NEHARI_DOUBLE("solver.tol_residual", solver.tol_residual),
      NEHARI_INT("solver.max_iters", solver.max_iters),
      NEHARI_INT("solver.battery_size", solver.battery_size),
      NEHARI_INT("solver.battery_random", solver.battery_random),
      NEHARI_DOUBLE("extremal.safety_factor", safety_factor),
      NEHARI_INT("sweep.points", sweep_points),
      NEHARI_DOUBLE("sweep.fraction", sweep_fraction),
      NEHARI_DOUBLE("fiber.A", fiber.A),
      NEHARI_DOUBLE("fiber.B", fiber.B),
      NEHARI_DOUBLE("fiber.C", fiber.C),
      NEHARI_DOUBLE("fiber.D", fiber.D),
      NEHARI_DOUBLE("fiber.p", fiber.p),
      NEHARI_DOUBLE("fiber.q", fiber.q),
      NEHARI_DOUBLE("fiber.alpha", fiber.alpha),
      NEHARI_DOUBLE("fiber.beta", fiber.beta),
      NEHARI_DOUBLE("fiber.theta", fiber.theta),
      Entry{"fiber.levels", [](RunConfig& c, const std::string& v) { c.fiber_levels = to_list(v); },
            [](const RunConfig& c) { return list_str(c.fiber_levels); }},
      NEHARI_INT("verify.samples", verify_samples),
      Entry{"run.seed", [](RunConfig& c, const std::string& v) { c.seed = to_int<std::uint64_t>(v); },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      Entry{"run.out", [](RunConfig& c, const std::string& v) { c.out_dir = v; },
            [](const RunConfig& c) { return c.out_dir; }},
  };
  return table;
}

#undef NEHARI_DOUBLE
#undef NEHARI_INT
#undef NEHARI_POTENTIAL
#undef NEHARI_WEIGHT

const Entry* find_entry(const std::string& key) {
  for (const Entry& e : entries())
    if (e.key == key) return &e;
  return nullptr;
}

struct Assignment {
  std::string key, value;
  int line = 0;
};

RunConfig apply(const std::vector<Assignment>& items) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  for (const Assignment& a : items) {
    const Entry* e = find_entry(a.key);
    if (!e) throw ConfigError(a.line, "unknown key '" + a.key + "'");
    if (auto [it, fresh] = seen.emplace(a.key, a.line); !fresh)
      throw ConfigError(a.line, "duplicate key '" + a.key + "' (first set on line " +
                                    std::to_string(it->second) + ")");
    try {
      e->set(cfg, a.value);
    } catch (const BadValue& bad) {
      throw ConfigError(a.line, a.key + ": " + bad.what);
    }
  }
  validate_run_config(cfg);
  return cfg;
}

void flatten(const ordered_json& j, const std::string& prefix, std::vector<Assignment>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  std::string value;
  if (j.is_string()) {
    value = j.get<std::string>();
  } else if (j.is_boolean()) {
    value = j.get<bool>() ? "true" : "false";
  } else if (j.is_number_float()) {
    value = format_double(j.get<double>());
  } else if (j.is_number()) {
    value = j.dump();
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) throw ConfigError(0, prefix + ": arrays may hold numbers only");
      if (i) value += ",";
      value += format_double(j[i].get<double>());
    }
  } else {
    throw ConfigError(0, prefix + ": unsupported JSON value");
  }
  out.push_back({prefix, value, 0});
}

void require_setting(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(0, what);
}

}  // namespace

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.tol_energy = solver.tol_energy;
  o.tol_residual = solver.tol_residual;
  o.max_iters = solver.max_iters;
  o.battery_size = solver.battery_size;
  o.battery_random = solver.battery_random;
  o.seed = seed;
  return o;
}

ExtremalOptions RunConfig::extremal_options() const {
  ExtremalOptions o;
  o.restarts = family.restarts;
  o.refine = family.restarts > 0;
  o.polish = family.polish;
  return o;
}

TrialFamily RunConfig::trial_family() const {
  if (family.kind == FamilyKind::fourier_modes) return TrialFamily::fourier_modes(family.count);
  if (family.kind == FamilyKind::gaussian_bumps) return TrialFamily::gaussian_bumps(family.count);
  throw ConfigError(0, "family.kind = custom is only available through the library interface");
}

bool RunConfig::operator==(const RunConfig& o) const {
  const auto fib = [](const FiberCoefficients& f) {
    return std::tuple{f.A, f.B, f.C, f.D, f.p, f.q, f.alpha, f.beta, f.theta};
  };
  return problem == o.problem && family == o.family && solver == o.solver &&
         safety_factor == o.safety_factor && sweep_points == o.sweep_points &&
         sweep_fraction == o.sweep_fraction && fib(fiber) == fib(o.fiber) &&
         fiber_levels == o.fiber_levels && verify_samples == o.verify_samples && seed == o.seed &&
         out_dir == o.out_dir;
}

void validate_run_config(const RunConfig& cfg) {
  try {
    cfg.problem.grid.validate();
    (void)Problem::build(cfg.problem);
  } catch (const PreconditionError& e) {
    throw ConfigError(0, e.what());
  }
  try {
    cfg.fiber.validate();
  } catch (const PreconditionError& e) {
    throw ValidationError("(P)", std::string("fiber coefficients: ") + e.what());
  }
  require_setting(!cfg.fiber_levels.empty(), "fiber.levels must not be empty");
  for (double l : cfg.fiber_levels) require_setting(l > 0.0, "fiber.levels must be positive");
  require_setting(cfg.family.kind != FamilyKind::custom,
                  "family.kind = custom is only available through the library interface");
  require_setting(cfg.family.count >= 1, "family.count must be >= 1");
  require_setting(cfg.family.restarts >= 0, "family.restarts must be >= 0");
  require_setting(cfg.solver.tol_energy > 0.0, "solver.tol_energy must be positive");
  require_setting(cfg.solver.tol_residual > 0.0, "solver.tol_residual must be positive");
  require_setting(cfg.solver.max_iters >= 1, "solver.max_iters must be >= 1");
  require_setting(cfg.solver.battery_random >= 0 && cfg.solver.battery_random <= cfg.solver.battery_size,
                  "solver.battery_random must lie in [0, solver.battery_size]");
  require_setting(cfg.safety_factor >= 1.0, "extremal.safety_factor must be >= 1");
  require_setting(cfg.sweep_points >= 1, "sweep.points must be >= 1");
  require_setting(cfg.sweep_fraction > 0.0 && cfg.sweep_fraction < 1.0, "sweep.fraction must lie in (0, 1)");
  require_setting(cfg.verify_samples >= 1, "verify.samples must be >= 1");
  require_setting(!cfg.out_dir.empty(), "run.out must not be empty");
}

RunConfig parse_config_text(const std::string& text) {
  std::vector<Assignment> items;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    Assignment a{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line};
    if (a.key.empty()) throw ConfigError(line, "missing key before '='");
    if (a.value.empty()) throw ConfigError(line, "missing value for '" + a.key + "'");
    items.push_back(std::move(a));
  }
  return apply(items);
}

RunConfig parse_config_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ConfigError(line, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError(1, "top-level JSON value must be an object");
  std::vector<Assignment> items;
  flatten(j, "", items);
  return apply(items);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool json = path.extension() == ".json" || (first != std::string::npos && text[first] == '{');
  return json ? parse_config_json(text) : parse_config_text(text);
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const Entry& e : entries()) {
    const std::string head = e.key.substr(0, e.key.find('.'));
    if (head != section) {
      if (!section.empty()) out += '\n';
      section = head;
    }
    out += e.key + " = " + e.get(cfg) + '\n';
  }
  return out;
}

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j = ordered_json::object();
  for (const Entry& e : entries()) {
    ordered_json* node = &j;
    std::string_view key = e.key;
    std::size_t dot;
    while ((dot = key.find('.')) != std::string_view::npos) {
      node = &(*node)[std::string(key.substr(0, dot))];
      key.remove_prefix(dot + 1);
    }
    const std::string value = e.get(cfg);
    if (e.key == "fiber.levels") {
      (*node)[std::string(key)] = cfg.fiber_levels;
    } else if (value == "true" || value == "false") {
      (*node)[std::string(key)] = value == "true";
    } else if (e.key == "run.seed") {
      (*node)[std::string(key)] = cfg.seed;
    } else {
      double d = 0.0;
      const auto res = std::from_chars(value.data(), value.data() + value.size(), d);
      if (res.ec == std::errc() && res.ptr == value.data() + value.size()) {
        (*node)[std::string(key)] = value.find_first_of(".eE") == std::string::npos &&
                                            value.find("nan") == std::string::npos
                                        ? ordered_json(std::stoll(value))
                                        : ordered_json(d);
      } else {
        (*node)[std::string(key)] = value;
      }
    }
  }
  return j;
}

}  // namespace nehari
