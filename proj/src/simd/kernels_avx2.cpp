#include <immintrin.h>

#include "bbofs/simd/kernels.hpp"

namespace bbofs::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(pa + k), _mm256_loadu_pd(pb + k));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(pa + k + 4), _mm256_loadu_pd(pb + k + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; k + 4 <= n; k += 4) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(pa + k), _mm256_loadu_pd(pb + k));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) {
    const double d = pa[k] - pb[k];
    sum += d * d;
  }
  return sum;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + k), _mm256_loadu_pd(pb + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + k + 4), _mm256_loadu_pd(pb + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + k), _mm256_loadu_pd(pb + k), acc0);
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) sum += pa[k] * pb[k];
  return sum;
}

// No FMA here: the separate multiply/add roundings match the scalar loop.
void axpy2(std::span<double> y, double alpha, std::span<const double> x1, double beta,
           std::span<const double> x2) noexcept {
  const std::size_t n = y.size();
  double* py = y.data();
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d t = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x1.data() + k)),
                                    _mm256_mul_pd(vb, _mm256_loadu_pd(x2.data() + k)));
    _mm256_storeu_pd(py + k, _mm256_add_pd(_mm256_loadu_pd(py + k), t));
  }
  for (; k < n; ++k) {
    const double t = alpha * x1[k] + beta * x2[k];
    py[k] += t;
  }
}

}  // namespace bbofs::simd::avx2
