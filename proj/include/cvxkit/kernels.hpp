#pragma once

#include <cstddef>
#include <span>

// Vector kernels behind the dense linear algebra. Scalar reference
// implementations always exist; an AVX2/FMA variant is selected at runtime
// when the host supports it. Backends are equivalence-tested against each
// other, so any of them may be forced for debugging.
namespace cvxkit::kernels {

enum class Backend { Scalar, Avx2 };

/// Backend currently in use.
Backend active_backend() noexcept;

/// Force a backend. Returns false (and leaves the selection unchanged)
/// when the requested backend is not supported on this host.
bool set_backend(Backend b) noexcept;

/// Re-run detection and pick the best supported backend.
void use_default_backend() noexcept;

/// True when the host CPU can run the AVX2/FMA variants.
bool avx2_supported() noexcept;

/// Inner product a.b. Sizes must match.
double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// y += alpha * x. Sizes must match.
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) noexcept;
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) noexcept;

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, std::size_t n) noexcept;
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) noexcept;
#endif

}  // namespace detail

}  // namespace cvxkit::kernels
