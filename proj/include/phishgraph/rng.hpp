#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace phishgraph {

// splitmix64: tiny, well-mixed 64-bit generator. Used everywhere randomness
// is needed so that results do not depend on the standard library's
// implementation-defined distributions.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, bound) without modulo bias (rejection sampling)
    uint64_t next_below(uint64_t bound) {
        if (bound == 0) return 0;
        uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // uniform double in [0, 1)
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // uniform float in [0, 1)
    float next_float() {
        return static_cast<float>(next() >> 40) * 0x1.0p-24f;
    }

private:
    uint64_t state_;
};

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// All stage/fold seeds derive from one master seed:
//   seed(stage, fold) = mix(master ^ fnv1a(stage) ^ (fold + 1))
// so reordering stages or running folds in parallel cannot change streams.
inline uint64_t derive_seed(uint64_t master, std::string_view stage, uint64_t fold = 0) {
    SplitMix64 mixer(master ^ fnv1a64(stage) ^ (0x9e3779b97f4a7c15ULL * (fold + 1)));
    return mixer.next();
}

// Fisher-Yates with an explicit generator; std::shuffle is
// implementation-defined and would break cross-platform determinism.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, SplitMix64& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace phishgraph
