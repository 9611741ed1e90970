#include <array>
#include <cmath>

#include "n00n/kernels.hpp"

namespace n00n::kernels::scalar {

namespace {

using Lanes = std::array<double, kReductionLanes>;

double combine(const Lanes& l) {
  return ((l[0] + l[1]) + (l[2] + l[3])) + ((l[4] + l[5]) + (l[6] + l[7]));
}

}  // namespace

// Element i always accumulates into lane i % 8, in increasing i. The SIMD
// variants keep exactly this assignment.
double dot(const double* a, const double* b, std::size_t n) {
  Lanes acc{};
  for (std::size_t i = 0; i < n; ++i) {
    acc[i % kReductionLanes] = std::fma(a[i], b[i], acc[i % kReductionLanes]);
  }
  return combine(acc);
}

double sum_squares(const double* a, std::size_t n) {
  Lanes acc{};
  for (std::size_t i = 0; i < n; ++i) {
    acc[i % kReductionLanes] = std::fma(a[i], a[i], acc[i % kReductionLanes]);
  }
  return combine(acc);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void gram_accumulate(const double* jac, std::size_t rows, std::size_t cols,
                     const double* r, double* gram, double* jtr) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = jac + i * cols;
    for (std::size_t a = 0; a < cols; ++a) {
      const double ja = row[a];
      double* g = gram + a * cols;
      for (std::size_t b = a; b < cols; ++b) g[b] = std::fma(ja, row[b], g[b]);
      jtr[a] = std::fma(ja, r[i], jtr[a]);
    }
  }
}

}  // namespace n00n::kernels::scalar
