// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "occm/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace occm::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), a1);
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double coulomb_row_avx2(const double* p, const PointsSoA& q, const double* w, double eps2) {
  const int dim = q.dim;
  __m256d pc[3];
  for (int k = 0; k < 3; ++k) pc[k] = _mm256_set1_pd(k < dim ? p[k] : 0.0);
  const __m256d ve = _mm256_set1_pd(eps2);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= q.n; j += 4) {
    __m256d r2 = ve;
    for (int k = 0; k < dim; ++k) {
      const __m256d d = _mm256_sub_pd(pc[k], _mm256_loadu_pd(q.axis[k] + j));
      r2 = _mm256_fmadd_pd(d, d, r2);
    }
    const __m256d v = _mm256_div_pd(one, _mm256_sqrt_pd(r2));
    acc = w ? _mm256_fmadd_pd(_mm256_loadu_pd(w + j), v, acc) : _mm256_add_pd(acc, v);
  }
  double s = hsum(acc);
  for (; j < q.n; ++j) {
    double r2 = eps2;
    for (int k = 0; k < dim; ++k) {
      const double d = p[k] - q.axis[k][j];
      r2 += d * d;
    }
    const double v = 1.0 / std::sqrt(r2);
    s += w ? w[j] * v : v;
  }
  return s;
}

const KernelTable kAvx2{sum_avx2, dot_avx2, axpy_avx2, coulomb_row_avx2};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace occm::kernels::detail
