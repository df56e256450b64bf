#include "metrics.hpp"

#include <algorithm>
#include <array>

#include "error.hpp"

namespace semcut {

namespace {

template <class A, class B>
void require_same_dims(const A& a, const B& b) {
  if (a.height() != b.height() || a.width() != b.width())
    fail(ErrorCode::dimension, "prediction " + std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                                   " and ground truth " + std::to_string(b.height()) + "x" +
                                   std::to_string(b.width()) + " differ in size");
}

double f_beta(double tp, double fp, double fn, double beta_sq) {
  const double precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 1.0;
  const double recall = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
  const double denom = beta_sq * precision + recall;
  return denom > 0.0 ? (1.0 + beta_sq) * precision * recall / denom : 0.0;
}

}  // namespace

double accuracy(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_dims(pred, gt);
  auto p = pred.values(), g = gt.values();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < p.size(); ++i) correct += p[i] == g[i];
  return static_cast<double>(correct) / static_cast<double>(p.size());
}

double iou(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_dims(pred, gt);
  auto p = pred.values(), g = gt.values();
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    inter += p[i] & g[i];
    uni += p[i] | g[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

FBetaResult max_f_beta(const SoftMask& pred, const BinaryMask& gt, double beta_sq) {
  require_same_dims(pred, gt);
  if (!(beta_sq > 0.0)) fail(ErrorCode::invalid_argument, "beta_sq must be > 0");
  const std::size_t positives = gt.count();
  if (positives == 0) fail(ErrorCode::empty_input, "max_f_beta: ground truth is empty");

  // A value v is predicted at threshold k/255 iff v > k/255, i.e. for k below
  // the first index whose threshold reaches v. Histogram those indices.
  std::array<double, kFBetaThresholds + 2> tp_at{}, fp_at{};
  const auto p = pred.values();
  const auto g = gt.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    int k = std::max(0, static_cast<int>(p[i] * 255.0) - 1);
    while (k < kFBetaThresholds && p[i] > static_cast<double>(k) / 255.0) ++k;
    (g[i] ? tp_at : fp_at)[static_cast<std::size_t>(k)] += 1.0;
  }
  // Predicted at threshold k  <=>  first index > k.
  std::array<double, kFBetaThresholds + 2> tp_above{}, fp_above{};
  for (int k = kFBetaThresholds; k >= 0; --k) {
    const auto i = static_cast<std::size_t>(k);
    tp_above[i] = tp_above[i + 1] + tp_at[i];
    fp_above[i] = fp_above[i + 1] + fp_at[i];
  }
  FBetaResult best{-1.0, 0.0};
  const double pos = static_cast<double>(positives);
  for (int k = 0; k < kFBetaThresholds; ++k) {
    const double tpk = tp_above[static_cast<std::size_t>(k) + 1];
    const double fpk = fp_above[static_cast<std::size_t>(k) + 1];
    const double f = f_beta(tpk, fpk, pos - tpk, beta_sq);
    if (f > best.value) best = {f, static_cast<double>(k) / 255.0};
  }
  return best;
}

double box_iou(const BoundingBox& a, const BoundingBox& b) {
  if (!a.valid() || !b.valid()) fail(ErrorCode::invalid_argument, "invalid bounding box");
  const std::int64_t ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min) + 1;
  const std::int64_t iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min) + 1;
  const std::int64_t inter = (ix > 0 && iy > 0) ? ix * iy : 0;
  return static_cast<double>(inter) / static_cast<double>(a.area() + b.area() - inter);
}

bool corloc(const BoundingBox& pred, std::span<const BoundingBox> gt_boxes) {
  if (gt_boxes.empty()) fail(ErrorCode::empty_input, "corloc: no ground-truth boxes");
  double best = 0.0;
  for (const auto& g : gt_boxes) best = std::max(best, box_iou(pred, g));
  return best > kCorLocIou;
}

SaliencyScores saliency_scores(const BinaryMask& pred, const SoftMask& pred_soft, const BinaryMask& gt,
                               double beta_sq) {
  const auto f = max_f_beta(pred_soft, gt, beta_sq);
  return {accuracy(pred, gt), iou(pred, gt), f.value, f.threshold};
}

}  // namespace semcut
