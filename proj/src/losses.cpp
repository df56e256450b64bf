#include "losses.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace semcut {

void LossWeights::validate() const {
  if (!(lambda_gtv_coarse >= 0.0)) fail(ErrorCode::config, "lambda_gtv_coarse must be >= 0");
  if (!(lambda_sr >= 0.0)) fail(ErrorCode::config, "lambda_sr must be >= 0");
  if (!(lambda_gtv_fine >= 0.0)) fail(ErrorCode::config, "lambda_gtv_fine must be >= 0");
}

LossValueGrad ncut_loss(std::span<const double> s, const AffinityMatrix& w) {
  const auto degrees = degree_vector(w);
  return ncut_loss(s, w, degrees);
}

LossValueGrad ncut_loss(std::span<const double> s, const AffinityMatrix& w, std::span<const double> degrees) {
  const std::size_t n = w.size();
  if (s.size() != n) fail(ErrorCode::dimension, "ncut: indicator length != node count");
  if (degrees.size() != n) fail(ErrorCode::dimension, "ncut: degree length != node count");

  std::vector<double> complement(n);
  for (std::size_t i = 0; i < n; ++i) complement[i] = 1.0 - s[i];
  const auto ws = w.multiply(s);
  const auto wc = w.multiply(complement);

  double num_a = 0.0, num_b = 0.0, den_a = 0.0, den_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num_a += s[i] * wc[i];
    num_b += complement[i] * ws[i];
    den_a += s[i] * degrees[i];
    den_b += complement[i] * degrees[i];
  }
  if (den_a <= kDenominatorGuard || den_b <= kDenominatorGuard)
    fail(ErrorCode::degenerate_partition,
         "ncut: partition association " + std::to_string(den_a <= den_b ? den_a : den_b) + " collapsed");

  const double ga = den_a;
  const double gb = den_b;
  LossValueGrad out;
  out.value = num_a / ga + num_b / gb;
  out.grad.resize(n);
  const double inv_sum = 1.0 / ga + 1.0 / gb;
  const double ca = num_a / (ga * ga);
  const double cb = num_b / (gb * gb);
  for (std::size_t i = 0; i < n; ++i) out.grad[i] = (wc[i] - ws[i]) * inv_sum - ca * degrees[i] + cb * degrees[i];
  return out;
}

LossValueGrad gtv_loss(std::span<const double> s, const AffinityMatrix& a) {
  const std::size_t n = a.size();
  if (s.size() != n) fail(ErrorCode::dimension, "gtv: signal length != node count");
  LossValueGrad out;
  out.grad.assign(n, 0.0);
  auto add = [&](std::size_t i, std::size_t j, double w) {
    const double diff = s[i] - s[j];
    out.value += w * diff * diff;
    out.grad[i] += 2.0 * w * diff;
    out.grad[j] -= 2.0 * w * diff;
  };
  if (a.kind() == AffinityMatrix::Kind::sparse) {
    for (const Edge& e : a.edges()) add(e.u, e.v, e.weight);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      auto row = a.row(i);
      for (std::size_t j = i + 1; j < n; ++j)
        if (row[j] != 0.0) add(i, j, row[j]);
    }
  }
  return out;
}

SrLossResult sr_loss(std::span<const double> fine, std::size_t fine_height, std::size_t fine_width,
                     std::span<const double> coarse, std::size_t coarse_height, std::size_t coarse_width) {
  if (fine.size() != fine_height * fine_width || coarse.size() != coarse_height * coarse_width)
    fail(ErrorCode::dimension, "sr: mask length does not match its dimensions");
  if (coarse_height == 0 || coarse_width == 0 || fine_height % coarse_height != 0 ||
      fine_width % coarse_width != 0 || fine_height / coarse_height != fine_width / coarse_width)
    fail(ErrorCode::dimension, "sr: fine dims " + std::to_string(fine_height) + "x" + std::to_string(fine_width) +
                                   " are not an integer multiple of coarse dims " + std::to_string(coarse_height) +
                                   "x" + std::to_string(coarse_width));
  const std::size_t r = fine_height / coarse_height;
  const auto pooled = avg_pool(fine, fine_height, fine_width, r);

  SrLossResult out;
  out.grad_coarse.resize(coarse.size());
  std::vector<double> residual(coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    residual[i] = pooled[i] - coarse[i];
    out.value += residual[i] * residual[i];
    out.grad_coarse[i] = -2.0 * residual[i];
  }
  // Pooling adjoint: each fine pixel receives 2*residual / r^2 of its block.
  const double scale = 2.0 / static_cast<double>(r * r);
  out.grad_fine.resize(fine.size());
  for (std::size_t y = 0; y < fine_height; ++y)
    for (std::size_t x = 0; x < fine_width; ++x)
      out.grad_fine[y * fine_width + x] = scale * residual[(y / r) * coarse_width + x / r];
  return out;
}

SrLossResult sr_loss(const SoftMask& fine, const SoftMask& coarse, std::size_t factor) {
  if (fine.height() != coarse.height() * factor || fine.width() != coarse.width() * factor)
    fail(ErrorCode::dimension, "sr: fine mask is not " + std::to_string(factor) + "x the coarse mask");
  return sr_loss(fine.values(), fine.height(), fine.width(), coarse.values(), coarse.height(), coarse.width());
}

TotalLoss total_loss(std::span<const double> coarse, std::size_t coarse_height, std::size_t coarse_width,
                     std::span<const double> fine, std::size_t fine_height, std::size_t fine_width,
                     const LossGraphs& graphs, const LossWeights& weights) {
  if (graphs.semantic == nullptr || graphs.coarse_neighborhood == nullptr)
    fail(ErrorCode::invalid_argument, "total_loss: semantic and coarse graphs are required");
  if (coarse.size() != coarse_height * coarse_width) fail(ErrorCode::dimension, "total_loss: coarse dims mismatch");
  const bool has_fine = !fine.empty();
  if (has_fine && graphs.pixel == nullptr) fail(ErrorCode::invalid_argument, "image required for pixel graph");

  TotalLoss out;
  auto ncut = graphs.semantic_degrees.empty() ? ncut_loss(coarse, *graphs.semantic)
                                              : ncut_loss(coarse, *graphs.semantic, graphs.semantic_degrees);
  auto gtv_c = gtv_loss(coarse, *graphs.coarse_neighborhood);
  out.terms.ncut = ncut.value;
  out.terms.gtv_coarse = gtv_c.value;
  out.value = ncut.value + weights.lambda_gtv_coarse * gtv_c.value;
  out.grad_coarse = std::move(ncut.grad);
  for (std::size_t i = 0; i < coarse.size(); ++i) out.grad_coarse[i] += weights.lambda_gtv_coarse * gtv_c.grad[i];
  if (!has_fine) return out;

  auto gtv_f = gtv_loss(fine, *graphs.pixel);
  auto sr = sr_loss(fine, fine_height, fine_width, coarse, coarse_height, coarse_width);
  out.terms.gtv_fine = gtv_f.value;
  out.terms.sr = sr.value;
  out.value = out.value + weights.lambda_gtv_fine * gtv_f.value;
  out.value = out.value + weights.lambda_sr * sr.value;
  for (std::size_t i = 0; i < coarse.size(); ++i) out.grad_coarse[i] += weights.lambda_sr * sr.grad_coarse[i];
  out.grad_fine = std::move(gtv_f.grad);
  for (std::size_t i = 0; i < fine.size(); ++i)
    out.grad_fine[i] = weights.lambda_gtv_fine * out.grad_fine[i] + weights.lambda_sr * sr.grad_fine[i];
  return out;
}

}  // namespace semcut
