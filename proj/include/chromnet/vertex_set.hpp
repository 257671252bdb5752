#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace chromnet {

/// Fixed-capacity bitset over vertex indices 0..255. Sized to the largest
/// graph the dataset format can store.
class VertexSet {
public:
    static constexpr int kWords = 4;
    static constexpr int kCapacity = kWords * 64;

    constexpr void set(int v) noexcept { words_[v >> 6] |= bit(v); }
    constexpr void reset(int v) noexcept { words_[v >> 6] &= ~bit(v); }
    constexpr bool test(int v) const noexcept { return (words_[v >> 6] & bit(v)) != 0; }

    constexpr bool empty() const noexcept {
        return (words_[0] | words_[1] | words_[2] | words_[3]) == 0;
    }

    constexpr int count() const noexcept {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }

    /// Lowest member, or -1 when empty.
    constexpr int first() const noexcept {
        for (int i = 0; i < kWords; ++i)
            if (words_[i]) return i * 64 + std::countr_zero(words_[i]);
        return -1;
    }

    constexpr VertexSet operator&(const VertexSet& o) const noexcept {
        VertexSet r;
        for (int i = 0; i < kWords; ++i) r.words_[i] = words_[i] & o.words_[i];
        return r;
    }
    constexpr VertexSet operator|(const VertexSet& o) const noexcept {
        VertexSet r;
        for (int i = 0; i < kWords; ++i) r.words_[i] = words_[i] | o.words_[i];
        return r;
    }
    /// Set difference.
    constexpr VertexSet operator-(const VertexSet& o) const noexcept {
        VertexSet r;
        for (int i = 0; i < kWords; ++i) r.words_[i] = words_[i] & ~o.words_[i];
        return r;
    }

    constexpr int intersect_count(const VertexSet& o) const noexcept {
        int c = 0;
        for (int i = 0; i < kWords; ++i) c += std::popcount(words_[i] & o.words_[i]);
        return c;
    }

    /// Calls f(v) for every member in ascending order.
    template <class F>
    constexpr void for_each(F&& f) const {
        for (int i = 0; i < kWords; ++i) {
            auto w = words_[i];
            while (w) {
                f(i * 64 + std::countr_zero(w));
                w &= w - 1;
            }
        }
    }

    friend constexpr bool operator==(const VertexSet&, const VertexSet&) = default;

private:
    static constexpr std::uint64_t bit(int v) noexcept { return std::uint64_t{1} << (v & 63); }
    std::array<std::uint64_t, kWords> words_{};
};

} // namespace chromnet
