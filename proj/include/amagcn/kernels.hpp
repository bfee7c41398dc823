#pragma once

#include "amagcn/matrix.hpp"

// Dense linear-algebra kernels. The OpenMP versions parallelize over output
// rows; every output cell is produced by exactly one thread with a fixed
// inner-loop reduction order, so results are bitwise identical to the serial
// reference at any thread count.

namespace amagcn::kernels {

Matrix matmul(const Matrix& a, const Matrix& b);     // a * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a * b^T

// Serial implementations kept as the ground truth for kernel tests and the
// benchmark baseline.
namespace reference {
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
}  // namespace reference

}  // namespace amagcn::kernels
