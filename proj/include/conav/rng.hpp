#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace conav {

// FNV-1a, used wherever a reproducible seed has to be derived from
// heterogeneous inputs. std::hash is not stable across implementations.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::uint64_t v, std::uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Deterministic RNG. Distributions are hand-rolled because the standard
// ones are implementation-defined; logs must be bit-identical everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n). Modulo bias is irrelevant here.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(engine_() % n);
    }

    bool bernoulli(double p) { return next_double() < p; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace conav
