#pragma once

// Vector kernels backing embedding training and similarity math.
//
// Every kernel exists as a scalar reference implementation plus SIMD
// variants (AVX2 on x86-64, NEON on ARM64) selected once at runtime from
// CPU capabilities. The scalar versions are the semantic reference; the
// SIMD versions are equivalence-tested against them. Reductions may differ
// from scalar results by reassociation rounding only.

#include <cstddef>

namespace phishgraph::simd {

enum class Backend {
    scalar,
    avx2,
    neon,
};

// Backend chosen at startup. Honors the PHISHGRAPH_SIMD environment
// variable ("scalar" | "avx2" | "neon" | "auto"); unavailable requests
// fall back to scalar.
Backend active_backend();
const char* backend_name(Backend b);

// Force a backend (used by equivalence tests). Returns the backend that is
// actually active afterwards (requests for unsupported ISAs are ignored).
Backend force_backend(Backend b);

// dot(a, b) = sum_i a[i]*b[i]
float dot(const float* a, const float* b, std::size_t n);

// squared_l2(a) = sum_i a[i]^2
float squared_l2(const float* a, std::size_t n);

// squared_distance(a, b) = sum_i (a[i]-b[i])^2
float squared_distance(const float* a, const float* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(float alpha, const float* x, float* y, std::size_t n);

// x[i] *= alpha
void scale(float* x, float alpha, std::size_t n);

// acc[i] += x[i]
void add_into(float* acc, const float* x, std::size_t n);

// Scalar reference implementations, always available regardless of the
// active backend. Tests compare the dispatched kernels against these.
namespace scalar {
float dot(const float* a, const float* b, std::size_t n);
float squared_l2(const float* a, std::size_t n);
float squared_distance(const float* a, const float* b, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);
void scale(float* x, float alpha, std::size_t n);
void add_into(float* acc, const float* x, std::size_t n);
}  // namespace scalar

}  // namespace phishgraph::simd
