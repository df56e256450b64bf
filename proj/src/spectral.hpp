#pragma once

#include <cstdint>
#include <vector>

#include "graph.hpp"

namespace semcut {

struct SpectralResult {
  std::vector<std::uint8_t> indicator;  // fiedler > mean(fiedler)
  std::vector<double> fiedler_vector;   // unit norm
  double fiedler_value = 0.0;
  std::vector<double> eigenvalues;      // ascending, of I - D^-1/2 W D^-1/2
  double residual = 0.0;                // ||L v - lambda v||_2
};

// Second eigenpair of the symmetrically normalized Laplacian.
SpectralResult spectral_bipartition(const AffinityMatrix& w);

// Dense normalized Laplacian, row-major; throws isolated_node on a zero degree.
std::vector<double> normalized_laplacian(const AffinityMatrix& w);

}  // namespace semcut
