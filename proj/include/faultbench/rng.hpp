#pragma once

#include <cstdint>
#include <string_view>

namespace faultbench {

/// Seeded PRNG (splitmix64) used everywhere determinism across platforms
/// matters. std::uniform_*_distribution output is implementation-defined,
/// so dataset bytes generated through it would differ between standard
/// libraries; this engine produces identical streams everywhere.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be > 0. Modulo bias is
    /// irrelevant at the ranges used here (n << 2^64).
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

    /// Uniform integer in [lo, hi] inclusive.
    int64_t next_in(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

private:
    uint64_t state_;
};

/// FNV-1a over a byte string; used to derive per-task seeds from task ids
/// so fault draws do not depend on execution order or worker count.
inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace faultbench
