#pragma once

#include <cstddef>

#include "rsca/grid.hpp"
#include "rsca/labelgen.hpp"

namespace rsca {

/// Predictions are clamped to [eps, 1 - eps] before taking logarithms.
inline constexpr double kProbEpsilon = 1e-7;

struct LossReport {
  double total = 0.0;              ///< mean loss over contributing pixels
  std::size_t n_pos = 0;           ///< contributing positives
  std::size_t n_neg_selected = 0;  ///< contributing negatives
};

/// Mean binary cross-entropy over non-ignored pixels.
LossReport bce_loss(const Grid& pred, const LabelMask& target);

/// d(bce_loss.total) / d(pred), zero on ignored pixels and where clamping is active.
Grid bce_loss_grad(const Grid& pred, const LabelMask& target);

/// Binary cross-entropy with hard negative mining: every positive plus the
/// min(ratio * n_pos, n_neg) negatives with the largest loss (ties broken by
/// pixel index). With no positives, the `fallback_cap` hardest negatives.
LossReport bce_ohem_loss(const Grid& pred, const LabelMask& target, std::size_t negative_ratio = 3,
                         std::size_t fallback_cap = 1000);

/// -alpha (1 - x)^gamma log x on positives, -(1 - alpha) x^gamma log(1 - x)
/// on negatives, averaged over non-ignored pixels.
LossReport focal_loss(const Grid& pred, const LabelMask& target, double gamma = 2.0, double alpha = 0.25);

}  // namespace rsca
