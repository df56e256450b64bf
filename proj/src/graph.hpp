#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core.hpp"

namespace semcut {

struct GraphConfig {
  double tau = 0.2;         // semantic-graph threshold
  double coarse_tau = 0.0;  // threshold for the 4-neighborhood patch graph
  double epsilon = 1e-6;
  double sigma = 1.0;       // pixel-graph bandwidth

  void validate() const;
  // Localization preset: a stricter semantic threshold keeps nearby objects apart.
  static GraphConfig detect();
};

struct Edge {
  std::uint32_t u;
  std::uint32_t v;
  double weight;
};

// Symmetric nonnegative weights, stored either densely (row-major n*n) or as
// an undirected edge list with each edge listed once.
class AffinityMatrix {
 public:
  enum class Kind { dense, sparse };

  static AffinityMatrix from_dense(std::size_t n, std::vector<double> weights);
  static AffinityMatrix from_edges(std::size_t n, std::vector<Edge> edges);

  Kind kind() const { return kind_; }
  std::size_t size() const { return n_; }

  // Dense access; throws for sparse storage.
  std::span<const double> dense() const;
  std::span<const double> row(std::size_t i) const;
  std::span<const Edge> edges() const { return edges_; }

  double weight(std::size_t i, std::size_t j) const;
  // y = A x, row sums accumulated in ascending column order (sparse: edge order).
  std::vector<double> multiply(std::span<const double> x) const;
  // Dense n*n copy, for either storage.
  std::vector<double> to_dense() const;

 private:
  AffinityMatrix(Kind kind, std::size_t n) : kind_(kind), n_(n) {}

  Kind kind_;
  std::size_t n_;
  std::vector<double> dense_;
  std::vector<Edge> edges_;
};

AffinityMatrix semantic_affinity(const FeatureGrid& features, const GraphConfig& cfg);
AffinityMatrix coarse_neighborhood_affinity(const FeatureGrid& features, const GraphConfig& cfg);
AffinityMatrix pixel_affinity(const RgbImage& image, double sigma);

std::vector<double> degree_vector(const AffinityMatrix& a);

// 4-neighborhood edges of a row-major grid: right neighbor then down neighbor, raster order.
std::vector<std::pair<std::uint32_t, std::uint32_t>> grid_neighbor_pairs(std::size_t height, std::size_t width);

}  // namespace semcut
