#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace signet {

// Seed derivation: every random decision in the pipeline draws from a stream
// named by (master seed, component label, indices). Streams are independent of
// worker scheduling and stable across platforms because the generator below is
// fully specified here (no std::*_distribution, which is implementation-defined).

inline uint64_t hash_combine(uint64_t h, uint64_t v) {
    // splitmix64 finalizer over a running state
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    uint64_t z = h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash_str(std::string_view s) {
    // FNV-1a 64
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline uint64_t derive_seed(uint64_t master, std::string_view purpose) {
    return hash_combine(master, hash_str(purpose));
}

inline uint64_t derive_seed(uint64_t master, std::string_view purpose, uint64_t a) {
    return hash_combine(derive_seed(master, purpose), a);
}

inline uint64_t derive_seed(uint64_t master, std::string_view purpose, uint64_t a, uint64_t b) {
    return hash_combine(derive_seed(master, purpose, a), b);
}

/// xoshiro256** with fixed splitmix64 seeding. Deterministic on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
        has_spare_ = false;
        spare_ = 0.0;
    }

    uint64_t next_u64() {
        auto rotl = [](uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n >= 1.
    uint64_t below(uint64_t n) {
        // multiply-shift; bias is negligible for the small ranges used here
        if (n <= 1) return 0;
        return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    /// Uniform integer in [lo, hi] inclusive.
    int64_t range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller with cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t s_[4];
    bool has_spare_;
    double spare_;
};

}  // namespace signet
