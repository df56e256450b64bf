#pragma once

#include <span>

#include "core.hpp"

namespace semcut {

struct SaliencyScores {
  double acc = 0.0;
  double iou = 0.0;
  double max_f_beta = 0.0;
  double argmax_threshold = 0.0;
};

inline constexpr double kDefaultBetaSq = 0.3;
inline constexpr int kFBetaThresholds = 256;
inline constexpr double kCorLocIou = 0.5;

double accuracy(const BinaryMask& pred, const BinaryMask& gt);

// Two empty masks score 1.
double iou(const BinaryMask& pred, const BinaryMask& gt);

struct FBetaResult {
  double value = 0.0;
  double threshold = 0.0;  // first of the k/255 thresholds reaching the maximum
};

// Sweeps t = k/255, predicting value > t. beta_sq is used directly as beta^2.
// Precision of an empty prediction is 1.
FBetaResult max_f_beta(const SoftMask& pred, const BinaryMask& gt, double beta_sq = kDefaultBetaSq);

double box_iou(const BoundingBox& a, const BoundingBox& b);
// True iff the best box IoU strictly exceeds 0.5.
bool corloc(const BoundingBox& pred, std::span<const BoundingBox> gt_boxes);

SaliencyScores saliency_scores(const BinaryMask& pred, const SoftMask& pred_soft, const BinaryMask& gt,
                               double beta_sq = kDefaultBetaSq);

}  // namespace semcut
