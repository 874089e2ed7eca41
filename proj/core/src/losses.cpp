#include "rsca/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rsca/errors.hpp"

namespace rsca {
namespace {

void check(const Grid& pred, const LabelMask& target) {
  if (pred.shape() != target.mask.shape() || pred.shape() != target.ignore.shape()) {
    throw ShapeError("loss: prediction " + to_string(pred.shape()) + " does not match target " +
                     to_string(target.mask.shape()));
  }
}

double clamp_prob(double x) { return std::clamp(x, kProbEpsilon, 1.0 - kProbEpsilon); }

double pixel_bce(double x, double y) {
  const double p = clamp_prob(x);
  return y != 0.0 ? -std::log(p) : -std::log(1.0 - p);
}

}  // namespace

LossReport bce_loss(const Grid& pred, const LabelMask& target) {
  check(pred, target);
  LossReport rep;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (target.ignore[i] != 0.0) continue;
    const double y = target.mask[i];
    sum += pixel_bce(pred[i], y);
    if (y != 0.0) {
      ++rep.n_pos;
    } else {
      ++rep.n_neg_selected;
    }
  }
  const std::size_t count = rep.n_pos + rep.n_neg_selected;
  rep.total = count > 0 ? sum / static_cast<double>(count) : 0.0;
  return rep;
}

Grid bce_loss_grad(const Grid& pred, const LabelMask& target) {
  check(pred, target);
  Grid g(pred.shape());
  std::size_t count = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) count += target.ignore[i] == 0.0 ? 1 : 0;
  if (count == 0) return g;
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (target.ignore[i] != 0.0) continue;
    const double x = pred[i];
    if (x < kProbEpsilon || x > 1.0 - kProbEpsilon) continue;
    g[i] = (target.mask[i] != 0.0 ? -1.0 / x : 1.0 / (1.0 - x)) * inv;
  }
  return g;
}

LossReport bce_ohem_loss(const Grid& pred, const LabelMask& target, std::size_t negative_ratio,
                         std::size_t fallback_cap) {
  check(pred, target);
  double pos_sum = 0.0;
  std::size_t n_pos = 0;
  std::vector<std::size_t> negatives;
  std::vector<double> loss(pred.size(), 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (target.ignore[i] != 0.0) continue;
    loss[i] = pixel_bce(pred[i], target.mask[i]);
    if (target.mask[i] != 0.0) {
      pos_sum += loss[i];
      ++n_pos;
    } else {
      negatives.push_back(i);
    }
  }
  const std::size_t keep =
      n_pos > 0 ? std::min(negative_ratio * n_pos, negatives.size()) : std::min(fallback_cap, negatives.size());
  // negatives is in index order, so a stable sort breaks ties by pixel index
  std::stable_sort(negatives.begin(), negatives.end(),
                   [&](std::size_t a, std::size_t b) { return loss[a] > loss[b]; });
  double neg_sum = 0.0;
  for (std::size_t k = 0; k < keep; ++k) neg_sum += loss[negatives[k]];

  LossReport rep;
  rep.n_pos = n_pos;
  rep.n_neg_selected = keep;
  const std::size_t count = n_pos + keep;
  rep.total = count > 0 ? (pos_sum + neg_sum) / static_cast<double>(count) : 0.0;
  return rep;
}

LossReport focal_loss(const Grid& pred, const LabelMask& target, double gamma, double alpha) {
  check(pred, target);
  if (!(gamma >= 0.0)) throw ParameterError("focal loss: gamma must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("focal loss: alpha must lie in (0, 1)");
  LossReport rep;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (target.ignore[i] != 0.0) continue;
    const double x = clamp_prob(pred[i]);
    if (target.mask[i] != 0.0) {
      sum += -alpha * std::pow(1.0 - x, gamma) * std::log(x);
      ++rep.n_pos;
    } else {
      sum += -(1.0 - alpha) * std::pow(x, gamma) * std::log(1.0 - x);
      ++rep.n_neg_selected;
    }
  }
  const std::size_t count = rep.n_pos + rep.n_neg_selected;
  rep.total = count > 0 ? sum / static_cast<double>(count) : 0.0;
  return rep;
}

}  // namespace rsca
