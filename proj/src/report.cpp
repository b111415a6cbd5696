#include "nehari/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "nehari/error.hpp"
#include "nehari/format.hpp"

namespace nehari {

namespace detail {
// Generated from schemas/*.json at configure time.
const std::map<std::string, std::string, std::less<>>& embedded_schemas();
}  // namespace detail

namespace {

Json num_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string type_of(const Json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
  if (v.is_number_float()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

bool type_matches(const Json& v, const std::string& t) {
  std::string actual = type_of(v);
  if (actual == t) return true;
  if (t == "number" && actual == "integer") return true;
  if (t == "integer" && actual == "number") {
    double x = v.get<double>();
    return std::isfinite(x) && std::floor(x) == x;
  }
  return false;
}

const Json& resolve(const Json& node, const Json& root) {
  if (!node.contains("$ref")) return node;
  std::string ref = node["$ref"].get<std::string>();
  if (ref.rfind("#", 0) != 0) throw Error("unsupported schema reference " + ref);
  return root.at(Json::json_pointer(ref.substr(1)));
}

void check(const Json& v, const Json& node, const Json& root, const std::string& where,
           std::vector<std::string>& errs) {
  const Json& s = resolve(node, root);
  if (s.contains("type")) {
    const Json& t = s["type"];
    bool ok = false;
    if (t.is_string()) ok = type_matches(v, t.get<std::string>());
    else
      for (const auto& alt : t) ok = ok || type_matches(v, alt.get<std::string>());
    if (!ok) {
      errs.push_back(where + ": expected type " + t.dump() + ", got " + type_of(v));
      return;
    }
  }
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || e == v;
    if (!found) errs.push_back(where + ": value " + v.dump() + " not in " + s["enum"].dump());
  }
  if (v.is_number()) {
    double x = v.get<double>();
    if (s.contains("minimum") && x < s["minimum"].get<double>())
      errs.push_back(where + ": " + format_double(x) + " below minimum " + s["minimum"].dump());
    if (s.contains("maximum") && x > s["maximum"].get<double>())
      errs.push_back(where + ": " + format_double(x) + " above maximum " + s["maximum"].dump());
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& k : s["required"])
        if (!v.contains(k.get<std::string>()))
          errs.push_back(where + ": missing property " + k.get<std::string>());
    const Json* props = s.contains("properties") ? &s["properties"] : nullptr;
    for (const auto& [k, child] : v.items()) {
      if (props && props->contains(k)) {
        check(child, (*props)[k], root, where + "/" + k, errs);
      } else if (s.contains("additionalProperties")) {
        const Json& ap = s["additionalProperties"];
        if (ap.is_boolean()) {
          if (!ap.get<bool>()) errs.push_back(where + ": unexpected property " + k);
        } else {
          check(child, ap, root, where + "/" + k, errs);
        }
      }
    }
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
      errs.push_back(where + ": fewer than " + s["minItems"].dump() + " items");
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i)
        check(v[i], s["items"], root, where + "/" + std::to_string(i), errs);
  }
}

}  // namespace

Json to_json(const FiberCoefficients& c) {
  return Json{{"A", c.A}, {"B", c.B}, {"C", c.C}, {"D", c.D}, {"p", c.p},
              {"q", c.q}, {"alpha", c.alpha}, {"beta", c.beta}, {"theta", c.theta}, {"eta", c.eta()}};
}

Json to_json(const CriticalPoints& cp) {
  return Json{{"t_n", cp.t_n}, {"t_e", cp.t_e}, {"lambda_n", cp.lambda_n}, {"lambda_e", cp.lambda_e}};
}

Json to_json(double lambda, const LevelRoots& r) {
  bool has = !r.empty;
  return Json{{"lambda", lambda},
              {"t_plus", has ? Json(r.t_plus) : Json(nullptr)},
              {"t_minus", has ? Json(r.t_minus) : Json(nullptr)},
              {"degenerate", r.degenerate},
              {"empty", r.empty}};
}

Json to_json(const EnergyBreakdown& e, const NehariClass& cls) {
  return Json{{"energy", e.energy}, {"d1", e.d1}, {"d2", e.d2},
              {"A", e.summary.A}, {"B", e.summary.B}, {"P", e.summary.P}, {"Q", e.summary.Q},
              {"class", std::string(to_string(cls.tag))}, {"tol", cls.tol}};
}

Json to_json(const ExtremalEstimate& e) {
  Json members = Json::array();
  for (const auto& m : e.members)
    members.push_back(Json{{"index", m.index},
                           {"skipped", m.skipped},
                           {"value", m.skipped ? Json(nullptr) : num_or_null(m.value)},
                           {"params", m.params}});
  return Json{{"kind", std::string(to_string(e.kind))},
              {"label", "estimate (upper bound)"},
              {"value", e.value},
              {"family_value", e.family_value},
              {"best_member", e.best_member},
              {"iterations", e.iterations},
              {"converged", e.converged},
              {"members", members}};
}

Json to_json(const EmbeddingEstimate& e) {
  return Json{{"r", e.r}, {"lower", e.lower}, {"certified", e.certified},
              {"safety_factor", e.safety_factor}, {"safety", e.safety()}};
}

Json to_json(const DiagnosticBounds& d) {
  return Json{{"S", d.S}, {"rho_tilde", d.rho_tilde}, {"rho", d.rho}, {"norm_floor", d.norm_floor},
              {"delta_C", d.delta_C}, {"C_rho", d.C_rho}, {"f_p", d.f_p}, {"f_q", d.f_q}};
}

Json to_json(const NehariSolution& s) {
  Json j{{"branch", std::string(to_string(s.branch))}, {"lambda", s.lambda}};
  const Json record = to_json(s.breakdown, s.classification);
  for (const auto& [k, v] : record.items()) j[k] = v;
  j["residual"] = num_or_null(s.residual);
  j["iterations"] = s.iterations;
  j["newton_steps"] = s.newton_steps;
  j["converged"] = s.converged;
  j["near_degenerate"] = s.near_degenerate;
  return j;
}

Json to_json(const VerifyCheck& c) {
  return Json{{"name", c.name}, {"passed", c.passed}, {"value", num_or_null(c.value)},
              {"threshold", num_or_null(c.threshold)}, {"detail", c.detail}};
}

Json to_json(const SweepRow& r) {
  return Json{{"lambda", r.lambda},
              {"ok_plus", r.ok_plus},
              {"ok_minus", r.ok_minus},
              {"c_plus", r.ok_plus ? num_or_null(r.c_plus) : Json(nullptr)},
              {"c_minus", r.ok_minus ? num_or_null(r.c_minus) : Json(nullptr)},
              {"e_minus_sign", r.e_minus_sign},
              {"iters_plus", r.iters_plus},
              {"iters_minus", r.iters_minus},
              {"residual_plus", num_or_null(r.residual_plus)},
              {"residual_minus", num_or_null(r.residual_minus)},
              {"class_plus", std::string(to_string(r.class_plus))},
              {"class_minus", std::string(to_string(r.class_minus))},
              {"t_plus", r.t_plus > 0 ? Json(r.t_plus) : Json(nullptr)},
              {"t_minus", r.t_minus > 0 ? Json(r.t_minus) : Json(nullptr)},
              {"error_plus", r.error_plus},
              {"error_minus", r.error_minus}};
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "lambda,c_plus,c_minus,e_minus_sign,iters_plus,iters_minus,residual_plus,residual_minus\n";
  for (const auto& r : rows)
    out << format_double(r.lambda) << ',' << (r.ok_plus ? format_double(r.c_plus) : "") << ','
        << (r.ok_minus ? format_double(r.c_minus) : "") << ',' << r.e_minus_sign << ','
        << r.iters_plus << ',' << r.iters_minus << ',' << format_double(r.residual_plus) << ','
        << format_double(r.residual_minus) << '\n';
  return out.str();
}

std::string members_csv(const std::vector<ExtremalEstimate>& estimates) {
  std::ostringstream out;
  out << "kind,member,skipped,value\n";
  for (const auto& e : estimates)
    for (const auto& m : e.members)
      out << to_string(e.kind) << ',' << m.index << ',' << (m.skipped ? 1 : 0) << ','
          << (m.skipped ? "" : format_double(m.value)) << '\n';
  return out.str();
}

std::string level_roots_csv(const CriticalPoints& cp,
                            const std::vector<std::pair<double, LevelRoots>>& roots) {
  std::ostringstream out;
  out << "lambda,t_n,t_e,lambda_n,lambda_e,t_plus,t_minus,status\n";
  for (const auto& [lambda, r] : roots) {
    const char* status = r.empty ? "empty" : r.degenerate ? "degenerate" : "two_roots";
    out << format_double(lambda) << ',' << format_double(cp.t_n) << ',' << format_double(cp.t_e)
        << ',' << format_double(cp.lambda_n) << ',' << format_double(cp.lambda_e) << ','
        << (r.empty ? "" : format_double(r.t_plus)) << ','
        << (r.empty ? "" : format_double(r.t_minus)) << ',' << status << '\n';
  }
  return out.str();
}

const std::string& schema_text(std::string_view name) {
  const auto& all = detail::embedded_schemas();
  auto it = all.find(name);
  if (it == all.end()) throw PreconditionError("unknown schema '" + std::string(name) + "'");
  return it->second;
}

Json schema(std::string_view name) { return Json::parse(schema_text(name)); }

std::vector<std::string> schema_errors(const Json& doc, const Json& sch) {
  std::vector<std::string> errs;
  check(doc, sch, sch, "", errs);
  return errs;
}

void require_schema(const Json& doc, std::string_view name) {
  auto errs = schema_errors(doc, schema(name));
  if (errs.empty()) return;
  std::string msg = "report does not match schema '" + std::string(name) + "':";
  for (const auto& e : errs) msg += "\n  " + (e.empty() ? std::string("/") : e);
  throw Error(msg);
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace nehari
