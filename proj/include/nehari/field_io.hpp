#pragma once

// Field files: a 32-byte little-endian header (u64 dim, u64 n, f64 L, f64 s)
// followed by n^dim little-endian f64 values; a JSON sidecar with provenance;
// CSV (x, value) rows for 1D fields.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nehari/field.hpp"

namespace nehari {

void write_field_binary(const std::filesystem::path& path, const ScalarField& f);
// Builds a fresh grid from the header.
ScalarField read_field_binary(const std::filesystem::path& path);
// Reads values onto an existing grid; the header must match it.
ScalarField read_field_binary(const std::filesystem::path& path, const GridPtr& grid);

void write_field_sidecar(const std::filesystem::path& path, const ScalarField& f,
                         const nlohmann::ordered_json& provenance);
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);

}  // namespace nehari
