#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "bbofs/simd/kernels.hpp"
#include "bbofs/svm.hpp"
#include "doctest.h"
#include "synthetic.hpp"

using namespace bbofs;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 10.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double scale_of(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i]) * std::abs(b[i]) + a[i] * a[i] + b[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u}) {
    const auto a = random_vector(rng, n), b = random_vector(rng, n);
    double d = 0.0, p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d += (a[i] - b[i]) * (a[i] - b[i]);
      p += a[i] * b[i];
    }
    CHECK(simd::scalar::squared_distance(a, b) == d);
    CHECK(simd::scalar::dot(a, b) == p);
  }
}

#if BBOFS_HAVE_AVX2_KERNELS
TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (simd::detected_isa() != simd::Isa::Avx2) {
    MESSAGE("CPU lacks AVX2; skipping");
    return;
  }
  std::mt19937_64 rng(2);
  for (std::size_t n = 0; n <= 67; ++n) {
    const auto a = random_vector(rng, n), b = random_vector(rng, n), c = random_vector(rng, n);
    const double tol = 1e-14 * (scale_of(a, b) + 1.0);
    CHECK(std::abs(simd::avx2::squared_distance(a, b) - simd::scalar::squared_distance(a, b)) <=
          tol);
    CHECK(std::abs(simd::avx2::dot(a, b) - simd::scalar::dot(a, b)) <= tol);

    auto y1 = c, y2 = c;
    simd::scalar::axpy2(y1, 0.37, a, -1.25, b);
    simd::avx2::axpy2(y2, 0.37, a, -1.25, b);
    CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);
  }
}

TEST_CASE("SVM results do not depend on the instruction set") {
  const auto ds = bbofs::testing::planted_dataset(40, 13, std::vector<GeneIndex>{0, 4}, 1.0, 5);
  const auto before = simd::active_isa();
  simd::set_isa(simd::Isa::Scalar);
  const auto m1 = svm_train(ds);
  simd::set_isa(simd::detected_isa());
  const auto m2 = svm_train(ds);
  simd::set_isa(before);
  CHECK(m1.solution().objective == doctest::Approx(m2.solution().objective).epsilon(1e-9));
  for (std::size_t s = 0; s < ds.n_samples(); ++s) {
    CHECK(m1.decision_value(ds.row(s)) == doctest::Approx(m2.decision_value(ds.row(s))).epsilon(1e-6));
    CHECK(svm_predict(m1, ds.row(s)) == svm_predict(m2, ds.row(s)));
  }
}
#endif

TEST_CASE("set_isa and dispatch") {
  const auto before = simd::active_isa();
  simd::set_isa(simd::Isa::Scalar);
  CHECK(simd::active_isa() == simd::Isa::Scalar);
  CHECK(simd::isa_name(simd::Isa::Scalar) == "scalar");
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(simd::dot(a, b) == 32.0);
  CHECK(simd::squared_distance(a, b) == 27.0);
  simd::set_isa(before);
}
