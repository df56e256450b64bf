#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "graph.hpp"

namespace semcut {

// An Ncut denominator at or below this is a collapsed partition and raises
// ErrorCode::degenerate_partition. Not added to the fractions, so hard
// indicators give the exact discrete Ncut.
inline constexpr double kDenominatorGuard = 1e-12;

struct LossValueGrad {
  double value = 0.0;
  std::vector<double> grad;
};

struct LossWeights {
  double lambda_gtv_coarse = 0.0006;
  double lambda_sr = 20.0;
  double lambda_gtv_fine = 0.0002;

  void validate() const;
};

// Relaxed two-way normalized cut of soft indicator s over w.
LossValueGrad ncut_loss(std::span<const double> s, const AffinityMatrix& w);
// Same, reusing precomputed degrees (w * 1).
LossValueGrad ncut_loss(std::span<const double> s, const AffinityMatrix& w, std::span<const double> degrees);

// Sum over undirected edges (each counted once) of w_ij (s_i - s_j)^2.
LossValueGrad gtv_loss(std::span<const double> s, const AffinityMatrix& a);

struct SrLossResult {
  double value = 0.0;
  std::vector<double> grad_fine;
  std::vector<double> grad_coarse;
};

// ||avg_pool(fine, r) - coarse||^2 (sum of squares), r = fine dims / coarse dims.
SrLossResult sr_loss(std::span<const double> fine, std::size_t fine_height, std::size_t fine_width,
                     std::span<const double> coarse, std::size_t coarse_height, std::size_t coarse_width);
SrLossResult sr_loss(const SoftMask& fine, const SoftMask& coarse, std::size_t factor);

struct LossTerms {
  double ncut = 0.0;
  double gtv_coarse = 0.0;
  double sr = 0.0;
  double gtv_fine = 0.0;
};

struct LossGraphs {
  const AffinityMatrix* semantic = nullptr;
  const AffinityMatrix* coarse_neighborhood = nullptr;
  const AffinityMatrix* pixel = nullptr;  // may be null when there is no fine variable
  std::span<const double> semantic_degrees;  // optional cache of semantic * 1
};

struct TotalLoss {
  LossTerms terms;
  double value = 0.0;
  std::vector<double> grad_coarse;
  std::vector<double> grad_fine;  // empty when no fine variable was given
};

// Weighted sum value = ((ncut + lc*gtv_coarse) + lf*gtv_fine) + lsr*sr, in that order.
// An empty fine span evaluates the coarse terms only.
TotalLoss total_loss(std::span<const double> coarse, std::size_t coarse_height, std::size_t coarse_width,
                     std::span<const double> fine, std::size_t fine_height, std::size_t fine_width,
                     const LossGraphs& graphs, const LossWeights& weights);

}  // namespace semcut
