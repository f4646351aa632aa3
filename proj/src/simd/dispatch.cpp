#include <atomic>
#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>

#include "bbofs/simd/kernels.hpp"

namespace bbofs::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if BBOFS_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  const Isa best = cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
  if (const char* env = std::getenv("BBOFS_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2" && best == Isa::Avx2) return Isa::Avx2;
    if (want != "avx2" && want != "auto")
      std::cerr << "warning: ignoring unknown BBOFS_SIMD value '" << want << "'\n";
  }
  return best;
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa detected_isa() noexcept { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && detected_isa() != Isa::Avx2)
    throw std::invalid_argument("AVX2 kernels are not supported on this CPU");
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) noexcept {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
#if BBOFS_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::Avx2) return avx2::squared_distance(a, b);
#endif
  return scalar::squared_distance(a, b);
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
#if BBOFS_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::Avx2) return avx2::dot(a, b);
#endif
  return scalar::dot(a, b);
}

void axpy2(std::span<double> y, double alpha, std::span<const double> x1, double beta,
           std::span<const double> x2) noexcept {
#if BBOFS_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::Avx2) return avx2::axpy2(y, alpha, x1, beta, x2);
#endif
  scalar::axpy2(y, alpha, x1, beta, x2);
}

}  // namespace bbofs::simd
