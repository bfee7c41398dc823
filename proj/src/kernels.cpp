#include "amagcn/kernels.hpp"

namespace amagcn::kernels {

namespace {

void require_inner(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DataError(std::string("inner dimension mismatch in ") + what);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  require_inner(a.cols, b.rows, "matmul");
  Matrix c(a.rows, b.cols);
  const std::size_t n = a.rows, k = a.cols, m = b.cols;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b.row(p);
      for (std::size_t j = 0; j < m; ++j) ci[j] += av * bp[j];
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require_inner(a.rows, b.rows, "matmul_tn");
  Matrix c(a.cols, b.cols);
  const std::size_t n = a.cols, k = a.rows, m = b.cols;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c.row(i);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a(p, i);
      if (av == 0.0) continue;
      const double* bp = b.row(p);
      for (std::size_t j = 0; j < m; ++j) ci[j] += av * bp[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require_inner(a.cols, b.cols, "matmul_nt");
  Matrix c(a.rows, b.rows);
  const std::size_t n = a.rows, k = a.cols, m = b.rows;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = c.row(i);
    const double* ai = a.row(i);
    for (std::size_t j = 0; j < m; ++j) {
      const double* bj = b.row(j);
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      ci[j] = s;
    }
  }
  return c;
}

namespace reference {

Matrix matmul(const Matrix& a, const Matrix& b) {
  require_inner(a.cols, b.rows, "matmul");
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t p = 0; p < a.cols; ++p) {
      const double av = a(i, p);
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += av * b(p, j);
    }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require_inner(a.rows, b.rows, "matmul_tn");
  Matrix c(a.cols, b.cols);
  for (std::size_t i = 0; i < a.cols; ++i)
    for (std::size_t p = 0; p < a.rows; ++p) {
      const double av = a(p, i);
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += av * b(p, j);
    }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require_inner(a.cols, b.cols, "matmul_nt");
  Matrix c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols; ++p) s += a(i, p) * b(j, p);
      c(i, j) = s;
    }
  return c;
}

}  // namespace reference

}  // namespace amagcn::kernels
