#pragma once

#include <stdexcept>
#include <string>

namespace rsca {

/// Raised when grid extents or channel counts are inconsistent.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised for out-of-range scalar configuration (rates, ratios, thresholds).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised for degenerate polygons (fewer than 3 distinct vertices, zero perimeter).
class GeometryError : public std::domain_error {
 public:
  explicit GeometryError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when reading malformed GRD1 / JSON / annotation files.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rsca
