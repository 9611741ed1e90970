#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "n00n/kernels.hpp"

namespace n00n::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::dot, &scalar::sum_squares, &scalar::axpy,
                              &scalar::gram_accumulate};
#if defined(N00N_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::dot, &avx2::sum_squares, &avx2::axpy,
                            &avx2::gram_accumulate};
#endif
#if defined(N00N_HAVE_NEON_KERNELS)
constexpr KernelTable kNeon{Isa::neon, &neon::dot, &neon::sum_squares, &neon::axpy,
                            &neon::gram_accumulate};
#endif

bool cpu_has_avx2() {
#if defined(N00N_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return has;
#else
  return false;
#endif
}

const KernelTable* best() {
  if (available(Isa::avx2)) return &table(Isa::avx2);
  if (available(Isa::neon)) return &table(Isa::neon);
  return &kScalar;
}

const KernelTable* initial() {
  if (const char* env = std::getenv("N00N_KERNELS"); env != nullptr && *env != '\0') {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == name(isa)) return &table(isa);
    }
    throw std::invalid_argument("N00N_KERNELS: unknown kernel variant '" + want + "'");
  }
  return best();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{initial()};
  return ptr;
}

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
    case Isa::neon:
#if defined(N00N_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) {
    throw std::invalid_argument("kernel variant '" + std::string(name(isa)) +
                                "' is not available on this machine");
  }
  switch (isa) {
#if defined(N00N_HAVE_AVX2_KERNELS)
    case Isa::avx2: return kAvx2;
#endif
#if defined(N00N_HAVE_NEON_KERNELS)
    case Isa::neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) { return active().sum_squares(a.data(), a.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace n00n::kernels
