#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cvxkit/kernels.hpp"

using namespace cvxkit;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(n);
  for (double& e : v) e = gauss(rng);
  return v;
}

long double dot_reference(const std::vector<double>& a, const std::vector<double>& b) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
  }
  return acc;
}

struct BackendGuard {
  ~BackendGuard() { kernels::use_default_backend(); }
};

}  // namespace

TEST_CASE("dot matches a long-double reference on both backends") {
  BackendGuard guard;
  std::mt19937_64 rng(42);
  for (std::size_t n : {0, 1, 3, 4, 7, 8, 15, 32, 67, 256}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    const double expected = static_cast<double>(dot_reference(a, b));
    const double tol = 1e-13 * (1.0 + std::abs(expected)) * (1.0 + static_cast<double>(n));

    REQUIRE(kernels::set_backend(kernels::Backend::Scalar));
    CHECK(std::abs(kernels::dot(a, b) - expected) <= tol);

    if (kernels::avx2_supported()) {
      REQUIRE(kernels::set_backend(kernels::Backend::Avx2));
      CHECK(std::abs(kernels::dot(a, b) - expected) <= tol);
    }
  }
}

TEST_CASE("axpy backends agree elementwise") {
  BackendGuard guard;
  if (!kernels::avx2_supported()) return;
  std::mt19937_64 rng(7);
  for (std::size_t n : {0, 1, 2, 5, 16, 33, 100}) {
    const auto x = random_vec(rng, n);
    auto y_scalar = random_vec(rng, n);
    auto y_simd = y_scalar;
    const double alpha = 0.37;

    REQUIRE(kernels::set_backend(kernels::Backend::Scalar));
    kernels::axpy(alpha, x, y_scalar);
    REQUIRE(kernels::set_backend(kernels::Backend::Avx2));
    kernels::axpy(alpha, x, y_simd);

    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(y_scalar[i] - y_simd[i]) <= 1e-15 * (1.0 + std::abs(y_scalar[i])));
    }
  }
}

TEST_CASE("dot backends agree on random data") {
  BackendGuard guard;
  if (!kernels::avx2_supported()) return;
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 90);
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    REQUIRE(kernels::set_backend(kernels::Backend::Scalar));
    const double s = kernels::dot(a, b);
    REQUIRE(kernels::set_backend(kernels::Backend::Avx2));
    const double v = kernels::dot(a, b);
    CHECK(std::abs(s - v) <= 1e-13 * (1.0 + std::abs(s)) * (1.0 + static_cast<double>(n)));
  }
}

TEST_CASE("backend selection reports support") {
  BackendGuard guard;
  REQUIRE(kernels::set_backend(kernels::Backend::Scalar));
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  if (kernels::avx2_supported()) {
    CHECK(kernels::set_backend(kernels::Backend::Avx2));
    CHECK(kernels::active_backend() == kernels::Backend::Avx2);
  } else {
    CHECK_FALSE(kernels::set_backend(kernels::Backend::Avx2));
    CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  }
}
