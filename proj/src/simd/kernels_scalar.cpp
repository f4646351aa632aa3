#include "bbofs/simd/kernels.hpp"

namespace bbofs::simd::scalar {

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return sum;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

void axpy2(std::span<double> y, double alpha, std::span<const double> x1, double beta,
           std::span<const double> x2) noexcept {
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double t = alpha * x1[k] + beta * x2[k];
    y[k] += t;
  }
}

}  // namespace bbofs::simd::scalar
