#pragma once

// JSON/CSV records for every result type, the shipped JSON schemas, and a
// small validator for the subset of JSON Schema they use.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nehari/extremal.hpp"
#include "nehari/solver.hpp"

namespace nehari {

using Json = nlohmann::ordered_json;

Json to_json(const FiberCoefficients& c);
Json to_json(const CriticalPoints& cp);
Json to_json(double lambda, const LevelRoots& r);
Json to_json(const EnergyBreakdown& e, const NehariClass& cls);
Json to_json(const ExtremalEstimate& e);
Json to_json(const EmbeddingEstimate& e);
Json to_json(const DiagnosticBounds& d);
Json to_json(const NehariSolution& s);
Json to_json(const VerifyCheck& c);
Json to_json(const SweepRow& r);

// CSV bodies, header line included; a header-only string for empty input.
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string members_csv(const std::vector<ExtremalEstimate>& estimates);
std::string level_roots_csv(const CriticalPoints& cp, const std::vector<std::pair<double, LevelRoots>>& roots);

// Names: "fiber", "extremal", "solve", "sweep", "verify", "field".
const std::string& schema_text(std::string_view name);
Json schema(std::string_view name);
// Empty when `doc` conforms. Supports type, enum, required, properties,
// additionalProperties, items, minimum, maximum, minItems.
std::vector<std::string> schema_errors(const Json& doc, const Json& schema);
// Throws Error listing the violations.
void require_schema(const Json& doc, std::string_view name);

// Pretty JSON with a trailing newline.
std::string dump_json(const Json& j);

void ensure_directory(const std::filesystem::path& dir);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace nehari
