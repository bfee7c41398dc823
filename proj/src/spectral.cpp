#include "amagcn/spectral.hpp"

#include <cmath>

#include "amagcn/errors.hpp"
#include "amagcn/kernels.hpp"

namespace amagcn::spectral {

Matrix normalized_laplacian(const Matrix& adjacency) {
  if (adjacency.rows != adjacency.cols)
    throw DataError("adjacency must be square");
  const std::size_t n = adjacency.rows;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (adjacency(i, j) != adjacency(j, i))
        throw DataError("adjacency must be symmetric");

  std::vector<double> inv_sqrt_deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += adjacency(i, j);
    inv_sqrt_deg[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }

  Matrix l(n, n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      l(i, j) = -adjacency(i, j) * inv_sqrt_deg[i] * inv_sqrt_deg[j];
    l(i, i) += 1.0;
  }
  return l;
}

Matrix scaled_laplacian(const Matrix& laplacian) {
  Matrix lt = laplacian;
  for (std::size_t i = 0; i < lt.rows; ++i) lt(i, i) -= 1.0;
  return lt;
}

ChebBasis chebyshev_basis(const Matrix& scaled, int order) {
  if (order < 0) throw UsageError("Chebyshev order must be nonnegative");
  ChebBasis basis;
  basis.order = order;
  basis.terms.reserve(static_cast<std::size_t>(order) + 1);
  basis.terms.push_back(Matrix::identity(scaled.rows));
  if (order >= 1) basis.terms.push_back(scaled);
  for (int k = 2; k <= order; ++k) {
    Matrix t = kernels::matmul(scaled, basis.terms[static_cast<std::size_t>(k - 1)]);
    const Matrix& prev = basis.terms[static_cast<std::size_t>(k - 2)];
    for (std::size_t i = 0; i < t.size(); ++i) t.data[i] = 2.0 * t.data[i] - prev.data[i];
    basis.terms.push_back(std::move(t));
  }
  return basis;
}

ChebBasis basis_for_adjacency(const Matrix& adjacency, int order) {
  return chebyshev_basis(scaled_laplacian(normalized_laplacian(adjacency)), order);
}

}  // namespace amagcn::spectral
