#pragma once

// Data-parallel inner loops of the SVM solver: squared distances for the RBF
// Gram matrix, the SMO gradient update and decision-function dot products.
//
// Each kernel has a scalar reference implementation and an AVX2 variant. The
// top-level functions dispatch on the instruction set chosen at startup
// (CPU detection, overridable with BBOFS_SIMD=scalar|avx2 or set_isa()).
// axpy2 is bitwise identical across variants; the reductions differ only by
// summation order.

#include <span>
#include <string_view>

namespace bbofs::simd {

enum class Isa { Scalar, Avx2 };

/// Best instruction set the running CPU supports.
Isa detected_isa() noexcept;
/// Instruction set currently used by the dispatching functions.
Isa active_isa() noexcept;
/// Forces an instruction set. Throws std::invalid_argument if unsupported.
void set_isa(Isa isa);
std::string_view isa_name(Isa isa) noexcept;

/// sum_k (a[k] - b[k])^2
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
/// sum_k a[k] * b[k]
double dot(std::span<const double> a, std::span<const double> b) noexcept;
/// y[k] += alpha * x1[k] + beta * x2[k]
void axpy2(std::span<double> y, double alpha, std::span<const double> x1, double beta,
           std::span<const double> x2) noexcept;

namespace scalar {
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;
void axpy2(std::span<double> y, double alpha, std::span<const double> x1, double beta,
           std::span<const double> x2) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define BBOFS_HAVE_AVX2_KERNELS 1
// Callable only when detected_isa() == Isa::Avx2.
namespace avx2 {
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;
void axpy2(std::span<double> y, double alpha, std::span<const double> x1, double beta,
           std::span<const double> x2) noexcept;
}  // namespace avx2
#else
#define BBOFS_HAVE_AVX2_KERNELS 0
#endif

}  // namespace bbofs::simd
