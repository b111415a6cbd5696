#include "nehari/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "nehari/error.hpp"
#include "nehari/format.hpp"

namespace nehari {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::string& buf, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  buf.append(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(const char* p) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

struct Header {
  GridSpec spec;
  std::string payload;
};

Header read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < 32) throw PreconditionError(path.string() + ": truncated field header");
  Header h;
  h.spec.dim = static_cast<int>(get_le<std::uint64_t>(data.data()));
  h.spec.points_per_axis = static_cast<int>(get_le<std::uint64_t>(data.data() + 8));
  h.spec.half_width = get_le<double>(data.data() + 16);
  h.spec.s = get_le<double>(data.data() + 24);
  h.spec.validate();
  h.payload = data.substr(32);
  if (h.payload.size() != h.spec.size() * 8)
    throw PreconditionError(path.string() + ": payload length does not match header");
  return h;
}

ScalarField decode(const Header& h, GridPtr grid) {
  ScalarField f(std::move(grid));
  for (std::size_t i = 0; i < f.size(); ++i)
    f.values[static_cast<Eigen::Index>(i)] = get_le<double>(h.payload.data() + 8 * i);
  return f;
}

}  // namespace

void write_field_binary(const std::filesystem::path& path, const ScalarField& f) {
  const GridSpec& g = f.grid->spec();
  std::string buf;
  buf.reserve(32 + 8 * f.size());
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(g.dim));
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(g.points_per_axis));
  put_le<double>(buf, g.half_width);
  put_le<double>(buf, g.s);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) put_le<double>(buf, f.values[i]);
  auto out = open_out(path, std::ios::binary);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

ScalarField read_field_binary(const std::filesystem::path& path) {
  const Header h = read_all(path);
  return decode(h, Grid::make(h.spec));
}

ScalarField read_field_binary(const std::filesystem::path& path, const GridPtr& grid) {
  const Header h = read_all(path);
  if (!(h.spec == grid->spec())) throw PreconditionError(path.string() + ": grid does not match");
  return decode(h, grid);
}

void write_field_sidecar(const std::filesystem::path& path, const ScalarField& f,
                         const nlohmann::ordered_json& provenance) {
  const GridSpec& g = f.grid->spec();
  nlohmann::ordered_json j;
  j["format"] = "nehari-field-v1";
  j["dim"] = g.dim;
  j["points_per_axis"] = g.points_per_axis;
  j["half_width"] = g.half_width;
  j["s"] = g.s;
  j["min"] = f.values.minCoeff();
  j["max"] = f.values.maxCoeff();
  j["provenance"] = provenance;
  auto out = open_out(path, std::ios::out);
  out << j.dump(2) << '\n';
  finish(out, path);
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f) {
  if (f.grid->spec().dim != 1) throw PreconditionError("CSV export is defined for 1D fields only");
  auto out = open_out(path, std::ios::out);
  out << "x,value\n";
  const auto& x = f.grid->x();
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    out << format_double(x[i]) << ',' << format_double(f.values[i]) << '\n';
  finish(out, path);
}

}  // namespace nehari
