#include "fdecon/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fdecon/error.hpp"

namespace fdecon {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw Error(ErrorCode::Io, "grid_io", "truncated FDG1 file: " + path);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

ObservationGrid read_fdg1(std::istream& is, const std::string& path) {
  const auto m = get_le<std::uint64_t>(is, path);
  const auto n = get_le<std::uint64_t>(is, path);
  const auto sigma = get_le<double>(is, path);
  if (m == 0 || n == 0 || m > (std::uint64_t{1} << 32) || n > (std::uint64_t{1} << 32))
    throw Error(ErrorCode::Io, "grid_io", "implausible FDG1 dimensions in " + path);
  std::vector<double> samples(m * n);
  for (auto& v : samples) v = get_le<double>(is, path);
  return ObservationGrid(m, n, sigma, std::move(samples));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_number(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Io, "grid_io", "bad number '" + s + "' in " + path);
  }
}

ObservationGrid read_csv(std::istream& is, const std::string& path) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::Io, "grid_io", "empty CSV grid: " + path);
  auto header = split_csv(line);
  if (header.size() != 3) throw Error(ErrorCode::Io, "grid_io", "CSV header must be 'M,N,sigma' in " + path);
  const auto m = static_cast<std::size_t>(parse_number(header[0], path));
  const auto n = static_cast<std::size_t>(parse_number(header[1], path));
  const double sigma = parse_number(header[2], path);
  std::vector<double> samples;
  samples.reserve(m * n);
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    if (cells.size() != n)
      throw Error(ErrorCode::Io, "grid_io",
                  "row " + std::to_string(rows) + " has " + std::to_string(cells.size()) + " values, expected " +
                      std::to_string(n) + " in " + path);
    for (const auto& c : cells) samples.push_back(parse_number(c, path));
    ++rows;
  }
  if (rows != m)
    throw Error(ErrorCode::Io, "grid_io", "expected " + std::to_string(m) + " rows, got " + std::to_string(rows));
  return ObservationGrid(m, n, sigma, std::move(samples));
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_grid_fdg1(const ObservationGrid& grid, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "grid_io", "cannot open " + path + " for writing");
  os.write("FDG1", 4);
  put_le<std::uint64_t>(os, grid.m());
  put_le<std::uint64_t>(os, grid.n());
  put_le<double>(os, grid.sigma());
  for (double v : grid.samples()) put_le<double>(os, v);
  if (!os) throw Error(ErrorCode::Io, "grid_io", "write failed: " + path);
}

void write_grid_csv(const ObservationGrid& grid, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "grid_io", "cannot open " + path + " for writing");
  os << grid.m() << ',' << grid.n() << ',' << std::setprecision(17) << grid.sigma() << '\n';
  for (std::size_t l = 0; l < grid.m(); ++l) {
    auto row = grid.row(l);
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  if (!os) throw Error(ErrorCode::Io, "grid_io", "write failed: " + path);
}

void write_grid(const ObservationGrid& grid, const std::string& path) {
  if (ends_with(path, ".csv"))
    write_grid_csv(grid, path);
  else
    write_grid_fdg1(grid, path);
}

ObservationGrid read_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "grid_io", "cannot open " + path);
  char magic[4] = {};
  is.read(magic, 4);
  if (is.gcount() == 4 && std::memcmp(magic, "FDG1", 4) == 0) return read_fdg1(is, path);
  is.clear();
  is.seekg(0);
  return read_csv(is, path);
}

}  // namespace fdecon
