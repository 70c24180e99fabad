#include "phishgraph/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace phishgraph::simd {

// ============================================================================
// Scalar reference kernels
// ============================================================================

namespace scalar {

float dot(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

float squared_l2(const float* a, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

float squared_distance(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
        float d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(float* x, float alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void add_into(float* acc, const float* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

}  // namespace scalar

// ============================================================================
// Dispatch
// ============================================================================

#if defined(__x86_64__) || defined(_M_X64)
#define PHISHGRAPH_HAVE_AVX2_BUILD 1
namespace avx2 {
float dot(const float* a, const float* b, std::size_t n);
float squared_l2(const float* a, std::size_t n);
float squared_distance(const float* a, const float* b, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);
void scale(float* x, float alpha, std::size_t n);
void add_into(float* acc, const float* x, std::size_t n);
}  // namespace avx2
#else
#define PHISHGRAPH_HAVE_AVX2_BUILD 0
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define PHISHGRAPH_HAVE_NEON_BUILD 1
namespace neon {
float dot(const float* a, const float* b, std::size_t n);
float squared_l2(const float* a, std::size_t n);
float squared_distance(const float* a, const float* b, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);
void scale(float* x, float alpha, std::size_t n);
void add_into(float* acc, const float* x, std::size_t n);
}  // namespace neon
#else
#define PHISHGRAPH_HAVE_NEON_BUILD 0
#endif

namespace {

struct KernelTable {
    float (*dot)(const float*, const float*, std::size_t);
    float (*squared_l2)(const float*, std::size_t);
    float (*squared_distance)(const float*, const float*, std::size_t);
    void (*axpy)(float, const float*, float*, std::size_t);
    void (*scale)(float*, float, std::size_t);
    void (*add_into)(float*, const float*, std::size_t);
};

constexpr KernelTable kScalarTable = {
    scalar::dot,  scalar::squared_l2, scalar::squared_distance,
    scalar::axpy, scalar::scale,      scalar::add_into,
};

#if PHISHGRAPH_HAVE_AVX2_BUILD
constexpr KernelTable kAvx2Table = {
    avx2::dot,  avx2::squared_l2, avx2::squared_distance,
    avx2::axpy, avx2::scale,      avx2::add_into,
};
#endif

#if PHISHGRAPH_HAVE_NEON_BUILD
constexpr KernelTable kNeonTable = {
    neon::dot,  neon::squared_l2, neon::squared_distance,
    neon::axpy, neon::scale,      neon::add_into,
};
#endif

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if PHISHGRAPH_HAVE_AVX2_BUILD
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
            return PHISHGRAPH_HAVE_NEON_BUILD != 0;
    }
    return false;
}

const KernelTable* table_for(Backend b) {
    switch (b) {
#if PHISHGRAPH_HAVE_AVX2_BUILD
        case Backend::avx2:
            return &kAvx2Table;
#endif
#if PHISHGRAPH_HAVE_NEON_BUILD
        case Backend::neon:
            return &kNeonTable;
#endif
        default:
            return &kScalarTable;
    }
}

Backend pick_initial_backend() {
    if (const char* env = std::getenv("PHISHGRAPH_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::avx2)) return Backend::avx2;
        if (std::strcmp(env, "neon") == 0 && backend_supported(Backend::neon)) return Backend::neon;
        if (std::strcmp(env, "auto") != 0) return Backend::scalar;
    }
    if (backend_supported(Backend::avx2)) return Backend::avx2;
    if (backend_supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

Backend g_backend = pick_initial_backend();
const KernelTable* g_table = table_for(g_backend);

}  // namespace

Backend active_backend() { return g_backend; }

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "unknown";
}

Backend force_backend(Backend b) {
    if (backend_supported(b)) {
        g_backend = b;
        g_table = table_for(b);
    }
    return g_backend;
}

float dot(const float* a, const float* b, std::size_t n) { return g_table->dot(a, b, n); }
float squared_l2(const float* a, std::size_t n) { return g_table->squared_l2(a, n); }
float squared_distance(const float* a, const float* b, std::size_t n) {
    return g_table->squared_distance(a, b, n);
}
void axpy(float alpha, const float* x, float* y, std::size_t n) { g_table->axpy(alpha, x, y, n); }
void scale(float* x, float alpha, std::size_t n) { g_table->scale(x, alpha, n); }
void add_into(float* acc, const float* x, std::size_t n) { g_table->add_into(acc, x, n); }

}  // namespace phishgraph::simd
