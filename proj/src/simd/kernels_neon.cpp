// NEON kernel variants for ARM64 builds.

#if defined(__aarch64__) || defined(_M_ARM64)

#include <arm_neon.h>

#include <cstddef>

namespace phishgraph::simd::neon {

float dot(const float* a, const float* b, std::size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = vfmaq_f32(acc, vld1q_f32(a + i), vld1q_f32(b + i));
    }
    float total = vaddvq_f32(acc);
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

float squared_l2(const float* a, std::size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t va = vld1q_f32(a + i);
        acc = vfmaq_f32(acc, va, va);
    }
    float total = vaddvq_f32(acc);
    for (; i < n; ++i) total += a[i] * a[i];
    return total;
}

float squared_distance(const float* a, const float* b, std::size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t d = vsubq_f32(vld1q_f32(a + i), vld1q_f32(b + i));
        acc = vfmaq_f32(acc, d, d);
    }
    float total = vaddvq_f32(acc);
    for (; i < n; ++i) {
        float d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
    float32x4_t va = vdupq_n_f32(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t vy = vld1q_f32(y + i);
        vy = vfmaq_f32(vy, va, vld1q_f32(x + i));
        vst1q_f32(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(float* x, float alpha, std::size_t n) {
    float32x4_t va = vdupq_n_f32(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(x + i, vmulq_f32(va, vld1q_f32(x + i)));
    }
    for (; i < n; ++i) x[i] *= alpha;
}

void add_into(float* acc, const float* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(acc + i, vaddq_f32(vld1q_f32(acc + i), vld1q_f32(x + i)));
    }
    for (; i < n; ++i) acc[i] += x[i];
}

}  // namespace phishgraph::simd::neon

#endif  // ARM64
