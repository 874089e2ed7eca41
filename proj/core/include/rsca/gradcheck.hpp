#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace rsca {

/// Operators covered by the finite-difference suite.
enum class GradOp {
  Conv,
  Nearest,
  Bilinear,
  Softmax,
  Deconv,
  PixelShuffle,
  Sigmoid,
  Reassembly,
  Lcau,
  Decoder,
  Bce,
};

inline constexpr std::array<GradOp, 11> kAllGradOps{GradOp::Conv,         GradOp::Nearest,    GradOp::Bilinear,
                                                    GradOp::Softmax,      GradOp::Deconv,     GradOp::PixelShuffle,
                                                    GradOp::Sigmoid,      GradOp::Reassembly, GradOp::Lcau,
                                                    GradOp::Decoder,      GradOp::Bce};

std::string_view to_string(GradOp op);
GradOp parse_grad_op(std::string_view name);

/// max |a - n| / max(max |a|, max |n|), 0 when both vanish.
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h at the listed
/// coordinates of x. x is perturbed in place and restored.
std::vector<double> central_difference(const std::function<double()>& f, std::span<double> x,
                                       std::span<const std::size_t> coords, double step);

struct GradCheckOptions {
  std::uint64_t seed = 0;
  int trials = 20;
  double step = 1e-3;
  double tolerance = 1e-4;
  /// Perturbs the analytic input gradient by 1% so the check must fail.
  bool inject_bug = false;
  /// Tensors larger than this are checked at a random subset of coordinates.
  std::size_t max_coords = 256;
};

struct GradCheckReport {
  GradOp op = GradOp::Conv;
  int trials = 0;
  double worst_error = 0.0;
  bool passed = true;
};

/// Runs `trials` seeded random instances (shapes up to 2x4x6x6) of the
/// scalar loss sum(G * op(x)) and compares every analytic cotangent
/// against central differences.
GradCheckReport run_gradcheck(GradOp op, const GradCheckOptions& options);

}  // namespace rsca
