#include "cvxkit/kernels.hpp"

#include <atomic>

namespace cvxkit::kernels {

namespace {

Backend detect() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return Backend::Avx2;
  }
#endif
  return Backend::Scalar;
}

std::atomic<Backend> g_backend{detect()};

}  // namespace

bool avx2_supported() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() noexcept { return g_backend.load(std::memory_order_relaxed); }

bool set_backend(Backend b) noexcept {
  if (b == Backend::Avx2 && !avx2_supported()) return false;
  g_backend.store(b, std::memory_order_relaxed);
  return true;
}

void use_default_backend() noexcept { g_backend.store(detect(), std::memory_order_relaxed); }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::Avx2) {
    return detail::dot_avx2(a.data(), b.data(), a.size());
  }
#endif
  return detail::dot_scalar(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::Avx2) {
    detail::axpy_avx2(alpha, x.data(), y.data(), x.size());
    return;
  }
#endif
  detail::axpy_scalar(alpha, x.data(), y.data(), x.size());
}

}  // namespace cvxkit::kernels
