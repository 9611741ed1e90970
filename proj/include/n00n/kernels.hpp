#pragma once

// Dense double-precision inner loops used by the network trainer.
//
// Every kernel has a scalar reference implementation and optional SIMD
// variants (AVX2+FMA on x86-64, NEON on AArch64). The variants are not merely
// close to the reference: they reproduce its rounding exactly. Reductions use a
// fixed set of eight fused-multiply-add lane accumulators combined by a fixed
// pairwise tree, and element-wise updates are single fma operations applied in
// row order. Training results are therefore bit-identical whichever variant is
// selected at runtime.

#include <cstddef>
#include <span>
#include <string_view>

namespace n00n::kernels {

enum class Isa { scalar, avx2, neon };

/// Number of independent accumulators every reduction kernel uses.
inline constexpr std::size_t kReductionLanes = 8;

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  // y[i] = fma(alpha, x[i], y[i])
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // For every row i of the row-major rows x cols matrix `jac`:
  //   gram[a*cols + b] = fma(jac[i,a], jac[i,b], gram[a*cols + b])  for b >= a
  //   jtr[a]           = fma(jac[i,a], r[i], jtr[a])
  // Only the upper triangle of `gram` is touched.
  void (*gram_accumulate)(const double* jac, std::size_t rows, std::size_t cols,
                          const double* r, double* gram, double* jtr);
};

std::string_view name(Isa isa);

/// True when the variant was compiled in and the running CPU supports it.
bool available(Isa isa);

/// Kernel table for a specific variant; throws std::invalid_argument when unavailable.
const KernelTable& table(Isa isa);

/// The best available variant, unless overridden by select() or by the
/// N00N_KERNELS environment variable ("scalar", "avx2", "neon").
const KernelTable& active();

/// Force a variant for the rest of the process. Throws when unavailable.
void select(Isa isa);

// Convenience wrappers over active().
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum_squares(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gram_accumulate(const double* jac, std::size_t rows, std::size_t cols,
                     const double* r, double* gram, double* jtr);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define N00N_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum_squares(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gram_accumulate(const double* jac, std::size_t rows, std::size_t cols,
                     const double* r, double* gram, double* jtr);
}  // namespace avx2
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
#define N00N_HAVE_NEON_KERNELS 1
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double sum_squares(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gram_accumulate(const double* jac, std::size_t rows, std::size_t cols,
                     const double* r, double* gram, double* jtr);
}  // namespace neon
#endif

}  // namespace n00n::kernels
