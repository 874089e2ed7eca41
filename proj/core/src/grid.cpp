#include "rsca/grid.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "rsca/errors.hpp"

namespace rsca {

std::string to_string(const Shape& s) {
  std::ostringstream os;
  os << '[' << s.n << 'x' << s.c << 'x' << s.h << 'x' << s.w << ']';
  return os.str();
}

Grid::Grid(Shape shape, double fill) : shape_(shape), data_(shape.size(), fill) {}

Grid::Grid(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size()) {
    throw ShapeError("grid data length " + std::to_string(data_.size()) +
                     " does not match shape " + to_string(shape_));
  }
}

std::span<double> Grid::plane(std::size_t n, std::size_t c) {
  return std::span<double>(data_).subspan(index(n, c, 0, 0), shape_.plane());
}

std::span<const double> Grid::plane(std::size_t n, std::size_t c) const {
  return std::span<const double>(data_).subspan(index(n, c, 0, 0), shape_.plane());
}

Grid& Grid::operator+=(const Grid& other) {
  if (other.shape_ != shape_) {
    throw ShapeError("cannot add " + to_string(other.shape_) + " to " + to_string(shape_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

bool Grid::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Grid zeros_like(const Grid& g) { return Grid(g.shape(), 0.0); }

std::vector<double> random_uniform(std::size_t count, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(count);
  for (auto& v : out) v = dist(rng);
  return out;
}

Grid random_uniform(Shape shape, double lo, double hi, std::uint64_t seed) {
  return Grid(shape, random_uniform(shape.size(), lo, hi, seed));
}

Grid init_weights(Shape shape, std::size_t fan_in, std::uint64_t seed) {
  if (fan_in == 0) throw ParameterError("fan_in must be positive");
  const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
  return random_uniform(shape, -s, s, seed);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace rsca
