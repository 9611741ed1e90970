#include "n00n/kernels.hpp"

#if defined(N00N_HAVE_NEON_KERNELS)

#include <arm_neon.h>

#include <array>
#include <cmath>

namespace n00n::kernels::neon {

namespace {

using Lanes = std::array<double, kReductionLanes>;

double combine(const Lanes& l) {
  return ((l[0] + l[1]) + (l[2] + l[3])) + ((l[4] + l[5]) + (l[6] + l[7]));
}

struct Acc {
  float64x2_t q[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
};

double finish(const Acc& acc, const double* a, const double* b, std::size_t base, std::size_t n) {
  Lanes lanes;
  for (int k = 0; k < 4; ++k) vst1q_f64(lanes.data() + 2 * k, acc.q[k]);
  for (std::size_t i = base; i < n; ++i) lanes[i - base] = std::fma(a[i], b[i], lanes[i - base]);
  return combine(lanes);
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  Acc acc;
  std::size_t i = 0;
  for (; i + kReductionLanes <= n; i += kReductionLanes) {
    for (int k = 0; k < 4; ++k) {
      acc.q[k] = vfmaq_f64(acc.q[k], vld1q_f64(a + i + 2 * k), vld1q_f64(b + i + 2 * k));
    }
  }
  return finish(acc, a, b, i, n);
}

double sum_squares(const double* a, std::size_t n) { return dot(a, a, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void gram_accumulate(const double* jac, std::size_t rows, std::size_t cols, const double* r,
                     double* gram, double* jtr) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = jac + i * cols;
    for (std::size_t a = 0; a < cols; ++a) {
      const double s = row[a];
      const float64x2_t v = vdupq_n_f64(s);
      double* g = gram + a * cols;
      std::size_t b = a;
      for (; b + 2 <= cols; b += 2) vst1q_f64(g + b, vfmaq_f64(vld1q_f64(g + b), v, vld1q_f64(row + b)));
      for (; b < cols; ++b) g[b] = std::fma(s, row[b], g[b]);
      jtr[a] = std::fma(s, r[i], jtr[a]);
    }
  }
}

}  // namespace n00n::kernels::neon

#endif
