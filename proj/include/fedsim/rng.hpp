#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace fedsim {

// All randomness in this library flows through the two generators below so
// that every run is reproducible from the 64-bit seeds recorded in configs,
// in any implementation language. The exact algorithms, seeding rules and
// test vectors are documented in README.md ("Random number generation").

// SplitMix64 step function (Steele, Lea & Flood). Used to expand seeds and
// to derive independent child seeds from a base seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Child seed = (tag+1)-th output of the SplitMix64 stream seeded with base.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag,
                                 std::uint64_t subtag) {
    return derive_seed(derive_seed(base, tag), subtag);
}

// xoshiro256** 1.0 (Blackman & Vigna), state filled from SplitMix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // [0, n). Modulo is biased by < n/2^64, negligible for our ranges and
    // trivial to reproduce in other languages.
    std::uint64_t next_below(std::uint64_t n) {
        return next_u64() % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Fisher-Yates from the back: for i = n-1 .. 1, swap(v[i], v[j]),
    // j = next_below(i+1).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // m distinct values from [0, k), ascending. Partial Fisher-Yates over
    // the id pool, then sort.
    std::vector<int> sample_without_replacement(int k, int m) {
        std::vector<int> pool(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < m; ++i) {
            const std::size_t j =
                static_cast<std::size_t>(i) +
                static_cast<std::size_t>(next_below(static_cast<std::uint64_t>(k - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }
        pool.resize(static_cast<std::size_t>(m));
        std::sort(pool.begin(), pool.end());
        return pool;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace fedsim
