#include "n00n/kernels.hpp"

#if defined(N00N_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <array>
#include <cmath>

#define N00N_AVX2_TARGET __attribute__((target("avx2,fma")))

namespace n00n::kernels::avx2 {

namespace {

using Lanes = std::array<double, kReductionLanes>;

double combine(const Lanes& l) {
  return ((l[0] + l[1]) + (l[2] + l[3])) + ((l[4] + l[5]) + (l[6] + l[7]));
}

// acc0 holds lanes 0..3, acc1 lanes 4..7. The tail continues lane-wise in
// scalar fma so every lane sees the same operand sequence as the reference.
N00N_AVX2_TARGET double finish(__m256d acc0, __m256d acc1, const double* a,
                               const double* b, std::size_t base, std::size_t n) {
  Lanes lanes;
  _mm256_storeu_pd(lanes.data(), acc0);
  _mm256_storeu_pd(lanes.data() + 4, acc1);
  for (std::size_t i = base; i < n; ++i) lanes[i - base] = std::fma(a[i], b[i], lanes[i - base]);
  return combine(lanes);
}

}  // namespace

N00N_AVX2_TARGET double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kReductionLanes <= n; i += kReductionLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  return finish(acc0, acc1, a, b, i, n);
}

N00N_AVX2_TARGET double sum_squares(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kReductionLanes <= n; i += kReductionLanes) {
    const __m256d x0 = _mm256_loadu_pd(a + i);
    const __m256d x1 = _mm256_loadu_pd(a + i + 4);
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
    acc1 = _mm256_fmadd_pd(x1, x1, acc1);
  }
  return finish(acc0, acc1, a, a, i, n);
}

N00N_AVX2_TARGET void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

namespace {

// Four rows per pass over the Gram matrix; each element still receives the
// row contributions one fma at a time in row order.
N00N_AVX2_TARGET void gram_block4(const double* r0, const double* r1, const double* r2,
                                  const double* r3, const double* res, std::size_t cols,
                                  double* gram, double* jtr) {
  for (std::size_t a = 0; a < cols; ++a) {
    const double s0 = r0[a], s1 = r1[a], s2 = r2[a], s3 = r3[a];
    const __m256d v0 = _mm256_set1_pd(s0);
    const __m256d v1 = _mm256_set1_pd(s1);
    const __m256d v2 = _mm256_set1_pd(s2);
    const __m256d v3 = _mm256_set1_pd(s3);
    double* g = gram + a * cols;
    std::size_t b = a;
    for (; b + 4 <= cols; b += 4) {
      __m256d acc = _mm256_loadu_pd(g + b);
      acc = _mm256_fmadd_pd(v0, _mm256_loadu_pd(r0 + b), acc);
      acc = _mm256_fmadd_pd(v1, _mm256_loadu_pd(r1 + b), acc);
      acc = _mm256_fmadd_pd(v2, _mm256_loadu_pd(r2 + b), acc);
      acc = _mm256_fmadd_pd(v3, _mm256_loadu_pd(r3 + b), acc);
      _mm256_storeu_pd(g + b, acc);
    }
    for (; b < cols; ++b) {
      double acc = g[b];
      acc = std::fma(s0, r0[b], acc);
      acc = std::fma(s1, r1[b], acc);
      acc = std::fma(s2, r2[b], acc);
      acc = std::fma(s3, r3[b], acc);
      g[b] = acc;
    }
    double t = jtr[a];
    t = std::fma(s0, res[0], t);
    t = std::fma(s1, res[1], t);
    t = std::fma(s2, res[2], t);
    t = std::fma(s3, res[3], t);
    jtr[a] = t;
  }
}

N00N_AVX2_TARGET void gram_row(const double* row, double res, std::size_t cols, double* gram,
                               double* jtr) {
  for (std::size_t a = 0; a < cols; ++a) {
    const double s = row[a];
    const __m256d v = _mm256_set1_pd(s);
    double* g = gram + a * cols;
    std::size_t b = a;
    for (; b + 4 <= cols; b += 4) {
      _mm256_storeu_pd(g + b, _mm256_fmadd_pd(v, _mm256_loadu_pd(row + b), _mm256_loadu_pd(g + b)));
    }
    for (; b < cols; ++b) g[b] = std::fma(s, row[b], g[b]);
    jtr[a] = std::fma(s, res, jtr[a]);
  }
}

}  // namespace

N00N_AVX2_TARGET void gram_accumulate(const double* jac, std::size_t rows, std::size_t cols,
                                      const double* r, double* gram, double* jtr) {
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    const double* base = jac + i * cols;
    gram_block4(base, base + cols, base + 2 * cols, base + 3 * cols, r + i, cols, gram, jtr);
  }
  for (; i < rows; ++i) gram_row(jac + i * cols, r[i], cols, gram, jtr);
}

}  // namespace n00n::kernels::avx2

#endif
