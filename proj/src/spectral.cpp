#include "spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace semcut {

std::vector<double> normalized_laplacian(const AffinityMatrix& w) {
  const std::size_t n = w.size();
  const auto degrees = degree_vector(w);
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(degrees[i] > 0.0)) fail(ErrorCode::isolated_node, "node " + std::to_string(i) + " has zero degree");
    inv_sqrt[i] = 1.0 / std::sqrt(degrees[i]);
  }
  const auto dense = w.to_dense();
  std::vector<double> lap(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      lap[i * n + j] = (i == j ? 1.0 : 0.0) - inv_sqrt[i] * dense[i * n + j] * inv_sqrt[j];
  return lap;
}

SpectralResult spectral_bipartition(const AffinityMatrix& w) {
  const std::size_t n = w.size();
  if (n < 2) fail(ErrorCode::invalid_argument, "spectral bipartition needs at least two nodes");
  const auto lap = normalized_laplacian(w);
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMat> l(lap.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(l);
  if (eig.info() != Eigen::Success) fail(ErrorCode::invalid_argument, "eigendecomposition did not converge");

  // The null vector D^1/2 1 is known exactly. When the two lowest eigenvalues
  // coincide (disconnected graph) the solver may return any basis of that
  // space, so project both candidates off it and keep the larger remainder.
  const auto degrees = degree_vector(w);
  Eigen::VectorXd null_vec(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) null_vec[static_cast<Eigen::Index>(i)] = std::sqrt(degrees[i]);
  null_vec.normalize();

  Eigen::VectorXd best;
  double best_norm = -1.0;
  for (Eigen::Index k = 0; k < 2; ++k) {
    Eigen::VectorXd v = eig.eigenvectors().col(k);
    v -= v.dot(null_vec) * null_vec;
    const double norm = v.norm();
    if (norm > best_norm) {
      best_norm = norm;
      best = v;
    }
  }
  best.normalize();

  SpectralResult out;
  out.eigenvalues.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
  out.fiedler_value = out.eigenvalues[1];
  out.fiedler_vector.assign(best.data(), best.data() + n);
  out.residual = (l * best - out.fiedler_value * best).norm();

  const double mean = std::accumulate(out.fiedler_vector.begin(), out.fiedler_vector.end(), 0.0) / n;
  out.indicator.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.indicator[i] = out.fiedler_vector[i] > mean ? 1 : 0;
  return out;
}

}  // namespace semcut
