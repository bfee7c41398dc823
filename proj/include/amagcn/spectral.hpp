#pragma once

#include <vector>

#include "amagcn/matrix.hpp"

namespace amagcn::spectral {

// Chebyshev polynomial basis of the scaled Laplacian, T_0..T_K.
struct ChebBasis {
  std::vector<Matrix> terms;
  int order = 0;
};

// Symmetric normalized Laplacian L = I - D^{-1/2} A D^{-1/2}. Isolated nodes
// (zero degree) keep an identity row. Input must be symmetric.
Matrix normalized_laplacian(const Matrix& adjacency);

// L - I, the lambda_max = 2 rescaling; eigenvalues land in [-1, 1].
Matrix scaled_laplacian(const Matrix& laplacian);

// T_0 = I, T_1 = L~, T_k = 2 L~ T_{k-1} - T_{k-2}.
ChebBasis chebyshev_basis(const Matrix& scaled, int order);

// Basis for a raw adjacency in one call.
ChebBasis basis_for_adjacency(const Matrix& adjacency, int order);

}  // namespace amagcn::spectral
