#include "graph.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace semcut {

void GraphConfig::validate() const {
  if (!(epsilon > 0.0)) fail(ErrorCode::config, "epsilon must be > 0");
  if (!(sigma > 0.0)) fail(ErrorCode::config, "sigma must be > 0");
  if (!(tau >= -1.0 && tau <= 1.0)) fail(ErrorCode::config, "tau must lie in [-1,1]");
  if (!(coarse_tau >= -1.0 && coarse_tau <= 1.0)) fail(ErrorCode::config, "coarse_tau must lie in [-1,1]");
}

GraphConfig GraphConfig::detect() {
  GraphConfig cfg;
  cfg.tau = 0.25;
  return cfg;
}

AffinityMatrix AffinityMatrix::from_dense(std::size_t n, std::vector<double> weights) {
  if (n == 0) fail(ErrorCode::dimension, "affinity needs at least one node");
  if (weights.size() != n * n) fail(ErrorCode::dimension, "dense affinity length != n*n");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights[i * n + j];
      if (!std::isfinite(w)) fail(ErrorCode::non_finite, "affinity contains non-finite weights");
      if (w < 0.0) fail(ErrorCode::invalid_argument, "affinity weights must be nonnegative");
      if (j > i && w != weights[j * n + i]) fail(ErrorCode::invalid_argument, "affinity must be symmetric");
    }
  }
  AffinityMatrix a(Kind::dense, n);
  a.dense_ = std::move(weights);
  return a;
}

AffinityMatrix AffinityMatrix::from_edges(std::size_t n, std::vector<Edge> edges) {
  if (n == 0) fail(ErrorCode::dimension, "affinity needs at least one node");
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) fail(ErrorCode::dimension, "edge endpoint out of range");
    if (e.u == e.v) fail(ErrorCode::invalid_argument, "sparse affinity does not store self-loops");
    if (!std::isfinite(e.weight)) fail(ErrorCode::non_finite, "affinity contains non-finite weights");
    if (e.weight < 0.0) fail(ErrorCode::invalid_argument, "affinity weights must be nonnegative");
  }
  AffinityMatrix a(Kind::sparse, n);
  a.edges_ = std::move(edges);
  return a;
}

std::span<const double> AffinityMatrix::dense() const {
  if (kind_ != Kind::dense) fail(ErrorCode::invalid_argument, "affinity is not dense");
  return dense_;
}

std::span<const double> AffinityMatrix::row(std::size_t i) const { return dense().subspan(i * n_, n_); }

double AffinityMatrix::weight(std::size_t i, std::size_t j) const {
  if (kind_ == Kind::dense) return dense_[i * n_ + j];
  double w = 0.0;
  for (const Edge& e : edges_)
    if ((e.u == i && e.v == j) || (e.u == j && e.v == i)) w += e.weight;
  return w;
}

std::vector<double> AffinityMatrix::multiply(std::span<const double> x) const {
  if (x.size() != n_) fail(ErrorCode::dimension, "affinity multiply: vector length mismatch");
  std::vector<double> y(n_, 0.0);
  if (kind_ == Kind::dense) {
    for (std::size_t i = 0; i < n_; ++i) {
      const double* r = dense_.data() + i * n_;
      double acc = 0.0;
      for (std::size_t j = 0; j < n_; ++j) acc += r[j] * x[j];
      y[i] = acc;
    }
  } else {
    for (const Edge& e : edges_) {
      y[e.u] += e.weight * x[e.v];
      y[e.v] += e.weight * x[e.u];
    }
  }
  return y;
}

std::vector<double> AffinityMatrix::to_dense() const {
  if (kind_ == Kind::dense) return dense_;
  std::vector<double> out(n_ * n_, 0.0);
  for (const Edge& e : edges_) {
    out[e.u * n_ + e.v] += e.weight;
    out[e.v * n_ + e.u] += e.weight;
  }
  return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> grid_neighbor_pairs(std::size_t height, std::size_t width) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(2 * height * width);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const auto i = static_cast<std::uint32_t>(y * width + x);
      if (x + 1 < width) pairs.emplace_back(i, i + 1);
      if (y + 1 < height) pairs.emplace_back(i, static_cast<std::uint32_t>(i + width));
    }
  }
  return pairs;
}

namespace {

// Node-major unit feature vectors; a zero vector stays zero and is flagged.
struct NormalizedFeatures {
  std::size_t dim;
  std::vector<double> data;
  std::vector<bool> zero;

  double dot(std::size_t i, std::size_t j) const {
    const double* a = data.data() + i * dim;
    const double* b = data.data() + j * dim;
    double acc = 0.0;
    for (std::size_t c = 0; c < dim; ++c) acc += a[c] * b[c];
    return acc;
  }
  bool above(std::size_t i, std::size_t j, double threshold) const {
    return !zero[i] && !zero[j] && dot(i, j) > threshold;
  }
};

NormalizedFeatures normalize(const FeatureGrid& f) {
  const std::size_t n = f.node_count(), d = f.channels();
  NormalizedFeatures out{d, std::vector<double>(n * d), std::vector<bool>(n, false)};
  auto src = f.data();
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t i = 0; i < n; ++i) out.data[i * d + c] = src[c * n + i];
  for (std::size_t i = 0; i < n; ++i) {
    double* v = out.data.data() + i * d;
    double sq = 0.0;
    for (std::size_t c = 0; c < d; ++c) sq += v[c] * v[c];
    const double norm = std::sqrt(sq);
    if (norm == 0.0 || !std::isfinite(norm)) {
      out.zero[i] = true;
      continue;
    }
    for (std::size_t c = 0; c < d; ++c) v[c] /= norm;
  }
  return out;
}

}  // namespace

AffinityMatrix semantic_affinity(const FeatureGrid& features, const GraphConfig& cfg) {
  cfg.validate();
  const std::size_t n = features.node_count();
  const NormalizedFeatures nf = normalize(features);
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = nf.above(i, j, cfg.tau) ? 1.0 : cfg.epsilon;
      w[i * n + j] = v;
      w[j * n + i] = v;
    }
  }
  return AffinityMatrix::from_dense(n, std::move(w));
}

AffinityMatrix coarse_neighborhood_affinity(const FeatureGrid& features, const GraphConfig& cfg) {
  cfg.validate();
  const NormalizedFeatures nf = normalize(features);
  std::vector<Edge> edges;
  for (auto [i, j] : grid_neighbor_pairs(features.height(), features.width()))
    edges.push_back({i, j, nf.above(i, j, cfg.coarse_tau) ? 1.0 : cfg.epsilon});
  return AffinityMatrix::from_edges(features.node_count(), std::move(edges));
}

AffinityMatrix pixel_affinity(const RgbImage& image, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::config, "sigma must be > 0");
  const std::size_t plane = image.pixel_count();
  auto px = image.data();
  std::vector<Edge> edges;
  for (auto [i, j] : grid_neighbor_pairs(image.height(), image.width())) {
    double sq = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      const double diff = px[c * plane + i] - px[c * plane + j];
      sq += diff * diff;
    }
    edges.push_back({i, j, std::exp(-sq / sigma)});
  }
  return AffinityMatrix::from_edges(plane, std::move(edges));
}

std::vector<double> degree_vector(const AffinityMatrix& a) {
  return a.multiply(std::vector<double>(a.size(), 1.0));
}

}  // namespace semcut
