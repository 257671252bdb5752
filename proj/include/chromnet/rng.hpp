#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace chromnet {

/// SplitMix64 finalizer. Used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Folds a sequence of keys into one seed: h = splitmix64(h ^ key) per key,
/// starting from h = 0.
constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = 0;
    for (auto k : keys) h = splitmix64(h ^ k);
    return h;
}

/// Portable random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The std distributions are not, so bounded integers and reals are
/// derived here: integers by bitmask rejection, reals from the top 53 bits.
/// Same seed gives the same draws on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [lo, hi] (inclusive).
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t range = hi - lo;
        if (range == 0) return lo;
        std::uint64_t mask = range;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        for (;;) {
            const std::uint64_t x = engine_() & mask;
            if (x <= range) return lo + x;
        }
    }

    /// Uniform double in [0, 1).
    double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

    /// Fisher-Yates shuffle, walking from the back.
    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, i - 1));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace chromnet
