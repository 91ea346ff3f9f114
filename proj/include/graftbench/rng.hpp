#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace graftbench {

// 64-bit FNV-1a. Used for seed derivation and file digests.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic generator wrapper. std::mt19937_64 raw output is fixed by the
// standard; the distribution helpers below are hand-rolled so streams are
// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, bound), bound > 0.
    std::uint64_t next_below(std::uint64_t bound);

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_unit() < p; }

    // Integer in [lo, hi] inclusive.
    std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t Rng::next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % bound;
}

// Mixes a master seed, a string tag and a counter into a fresh seed. Distinct
// (tag, counter) pairs map to distinct outputs except for ~2^-64 collisions.
inline std::int64_t derive_seed(std::int64_t master_seed, std::string_view tag, std::int64_t counter) {
    std::uint64_t x = splitmix64(static_cast<std::uint64_t>(master_seed) ^ fnv1a64(tag));
    x = splitmix64(x ^ static_cast<std::uint64_t>(counter));
    return static_cast<std::int64_t>(x);
}

}  // namespace graftbench
