#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace rnss {

namespace detail {

// splitmix64 finalizer; used to mix seed material into stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace detail

/// Derive the seed of an independent stream from (global seed, party index,
/// stream label). Adding parties or labels never perturbs other streams.
inline std::uint64_t stream_seed(std::uint64_t global_seed, int party_index,
                                 std::string_view label) {
    std::uint64_t h = detail::mix64(global_seed);
    h = detail::mix64(h ^ static_cast<std::uint64_t>(party_index + 1));
    h = detail::mix64(h ^ detail::hash_label(label));
    return h;
}

/// Deterministic random stream. Gaussian draws use an explicit Box-Muller
/// transform so that sequences are reproducible independent of the standard
/// library implementation (std::normal_distribution is not pinned down).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// One Gaussian draw; two uniforms are consumed per call.
    double gaussian(double mean, double stddev) {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        return mean + stddev * (r * std::cos(two_pi * u2));
    }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        // modulo rejection keeps the draw unbiased and deterministic
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return v % bound;
    }

    /// k distinct indices drawn uniformly without replacement from [0, n).
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> pool(n);
        for (int i = 0; i < n; ++i) pool[i] = i;
        for (int i = 0; i < k; ++i) {
            const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace rnss
