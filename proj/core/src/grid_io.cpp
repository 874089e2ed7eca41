#include "rsca/grid_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "rsca/errors.hpp"

namespace rsca {
namespace {

constexpr std::array<char, 4> kMagic{'G', 'R', 'D', '1'};

template <typename U>
void put_le(std::ostream& os, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& is) {
  std::array<unsigned char, sizeof(U)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!is) throw FormatError("GRD1: truncated stream");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_grd1(std::ostream& os, const Grid& grid) {
  const Shape& s = grid.shape();
  for (auto e : {s.n, s.c, s.h, s.w}) {
    if (e > std::numeric_limits<std::uint32_t>::max()) throw ShapeError("GRD1: extent exceeds 32 bits");
  }
  os.write(kMagic.data(), kMagic.size());
  for (auto e : {s.n, s.c, s.h, s.w}) put_le<std::uint32_t>(os, static_cast<std::uint32_t>(e));
  for (double v : grid.data()) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v));
  if (!os) throw FormatError("GRD1: write failed");
}

Grid read_grd1(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw FormatError("GRD1: bad magic");
  Shape s;
  s.n = get_le<std::uint32_t>(is);
  s.c = get_le<std::uint32_t>(is);
  s.h = get_le<std::uint32_t>(is);
  s.w = get_le<std::uint32_t>(is);
  std::vector<double> data(s.size());
  for (auto& v : data) v = std::bit_cast<double>(get_le<std::uint64_t>(is));
  return Grid(s, std::move(data));
}

void save_grd1(const std::filesystem::path& path, const Grid& grid) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("GRD1: cannot open " + path.string() + " for writing");
  write_grd1(os, grid);
}

Grid load_grd1(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("GRD1: cannot open " + path.string());
  try {
    return read_grd1(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string encode_grd1(const Grid& grid) {
  std::ostringstream os(std::ios::binary);
  write_grd1(os, grid);
  return std::move(os).str();
}

Grid decode_grd1(const std::string& bytes) {
  std::istringstream is(bytes, std::ios::binary);
  return read_grd1(is);
}

}  // namespace rsca
