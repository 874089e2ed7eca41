#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rsca {

/// Extents of a rank-4 (batch, channel, row, column) array.
struct Shape {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  constexpr std::size_t size() const { return n * c * h * w; }
  constexpr std::size_t plane() const { return h * w; }
  friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// Dense row-major (n, c, y, x) array of 64-bit reals.
class Grid {
 public:
  Grid() = default;
  explicit Grid(Shape shape, double fill = 0.0);
  Grid(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  std::size_t index(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return ((n * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }
  double& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) {
    return data_[index(n, c, y, x)];
  }
  double at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[index(n, c, y, x)];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Contiguous (h, w) plane of one (n, c) pair.
  std::span<double> plane(std::size_t n, std::size_t c);
  std::span<const double> plane(std::size_t n, std::size_t c) const;

  Grid& operator+=(const Grid& other);
  bool all_finite() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Shape shape_{};
  std::vector<double> data_;
};

Grid zeros_like(const Grid& g);

/// A value together with its accumulated cotangent. grad starts at zero.
struct DualGrid {
  Grid value;
  Grid grad;

  explicit DualGrid(Grid v) : value(std::move(v)), grad(zeros_like(value)) {}
};

/// Uniform samples in [lo, hi) from a seeded 64-bit Mersenne twister.
Grid random_uniform(Shape shape, double lo, double hi, std::uint64_t seed);
std::vector<double> random_uniform(std::size_t count, double lo, double hi, std::uint64_t seed);

/// Learnable-weight initializer: uniform in [-s, s] with s = 1 / sqrt(fan_in).
Grid init_weights(Shape shape, std::size_t fan_in, std::uint64_t seed);

/// Derive a child seed for the i-th parameter tensor of a model.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace rsca
