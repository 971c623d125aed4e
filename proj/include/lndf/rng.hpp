#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace lndf {

/// Seeded random stream with fully specified draw algorithms, so that any
/// value produced from a given seed is stable across platforms and stdlib
/// versions. All sampling in the toolkit goes through this type.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {
        // warm up splitmix so nearby seeds decorrelate
        for (int i = 0; i < 4; ++i) next_u64();
    }

    uint64_t next_u64() {
        // splitmix64
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n), rejection-free modulo bias below 2^-64 * n.
    uint64_t index(uint64_t n) {
        // Lemire's multiply-shift reduction
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller (consumes two uniforms per pair).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Fisher-Yates shuffle with draws from this stream.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace lndf
