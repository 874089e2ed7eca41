#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "rsca/grid.hpp"

namespace rsca {

// GRD1 container:
//   bytes 0..3   "GRD1"
//   4 x u32 LE   n, c, h, w
//   n*c*h*w x f64 LE, row-major (n, c, y, x)

void write_grd1(std::ostream& os, const Grid& grid);
Grid read_grd1(std::istream& is);

void save_grd1(const std::filesystem::path& path, const Grid& grid);
Grid load_grd1(const std::filesystem::path& path);

std::string encode_grd1(const Grid& grid);
Grid decode_grd1(const std::string& bytes);

}  // namespace rsca
