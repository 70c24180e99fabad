#include <doctest.h>

#include <cmath>
#include <vector>

#include "phishgraph/rng.hpp"
#include "phishgraph/simd/kernels.hpp"

using namespace phishgraph;

namespace {

std::vector<float> random_vec(SplitMix64& rng, size_t n) {
    std::vector<float> v(n);
    for (auto& x : v) x = rng.next_float() * 4.0f - 2.0f;
    return v;
}

bool close(float a, float b, float rel) {
    float scale = std::max({1.0f, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= rel * scale;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("dispatched kernels match the scalar reference") {
    simd::Backend initial = simd::active_backend();
    // exercise every backend this machine supports
    for (simd::Backend b : {simd::Backend::avx2, simd::Backend::neon}) {
        if (simd::force_backend(b) != b) continue;
        CAPTURE(simd::backend_name(b));
        SplitMix64 rng(42);
        // sizes straddling the vector width to hit remainder loops
        for (size_t n : {0, 1, 3, 7, 8, 9, 15, 16, 17, 31, 32, 33, 100}) {
            auto x = random_vec(rng, n);
            auto y = random_vec(rng, n);

            CHECK(close(simd::dot(x.data(), y.data(), n),
                        simd::scalar::dot(x.data(), y.data(), n), 1e-4f));
            CHECK(close(simd::squared_l2(x.data(), n),
                        simd::scalar::squared_l2(x.data(), n), 1e-4f));
            CHECK(close(simd::squared_distance(x.data(), y.data(), n),
                        simd::scalar::squared_distance(x.data(), y.data(), n), 1e-4f));

            auto y1 = y, y2 = y;
            simd::axpy(0.37f, x.data(), y1.data(), n);
            simd::scalar::axpy(0.37f, x.data(), y2.data(), n);
            for (size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 1e-6f));

            auto x1 = x, x2 = x;
            simd::scale(x1.data(), -1.4f, n);
            simd::scalar::scale(x2.data(), -1.4f, n);
            for (size_t i = 0; i < n; ++i) CHECK(x1[i] == x2[i]);

            auto a1 = x, a2 = x;
            simd::add_into(a1.data(), y.data(), n);
            simd::scalar::add_into(a2.data(), y.data(), n);
            for (size_t i = 0; i < n; ++i) CHECK(a1[i] == a2[i]);
        }
    }
    simd::force_backend(initial);
}

TEST_CASE("scalar backend can always be forced") {
    simd::Backend initial = simd::active_backend();
    CHECK(simd::force_backend(simd::Backend::scalar) == simd::Backend::scalar);
    float a[3] = {1.0f, 2.0f, 3.0f};
    float b[3] = {4.0f, 5.0f, 6.0f};
    CHECK(simd::dot(a, b, 3) == doctest::Approx(32.0f));
    simd::force_backend(initial);
}

}  // TEST_SUITE
