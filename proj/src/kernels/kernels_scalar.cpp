#include "occm/kernels.hpp"

#include <cmath>

namespace occm::kernels::detail {
namespace {

// Pairwise summation over blocks of 8; error grows like log(n) instead of n.
double sum_scalar(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = (n / 2 + 7) & ~std::size_t{7};
  const std::size_t left = half < n ? half : n / 2;
  return sum_scalar(x, left) + sum_scalar(x + left, n - left);
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += a[i] * b[i];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) acc[0] += a[i] * b[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double coulomb_row_scalar(const double* p, const PointsSoA& q, const double* w, double eps2) {
  double acc = 0.0;
  for (std::size_t j = 0; j < q.n; ++j) {
    double r2 = eps2;
    for (int k = 0; k < q.dim; ++k) {
      const double d = p[k] - q.axis[k][j];
      r2 += d * d;
    }
    const double v = 1.0 / std::sqrt(r2);
    acc += w ? w[j] * v : v;
  }
  return acc;
}

const KernelTable kScalar{sum_scalar, dot_scalar, axpy_scalar, coulomb_row_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace occm::kernels::detail
