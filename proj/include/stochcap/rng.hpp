#pragma once

// Counter-based random streams. A stream is fully determined by its key, and
// the k-th draw depends only on (key, k), so substreams keyed by run and level
// indices are independent of the order in which work is executed.

#include <cstdint>
#include <initializer_list>

namespace stochcap {

// SplitMix64 finaliser (Steele, Lea & Flood).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stable hash of an ordered tuple of integers.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
    return h;
}

class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept { return mix64(key_ ^ mix64(counter_++)); }

    // Uniform on (0, 1]; never returns 0 so `u <= p` is false for p = 0.
    constexpr double uniform() noexcept {
        return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    }

    constexpr CounterRng substream(std::uint64_t index) const noexcept {
        return CounterRng(derive_key({key_, index}));
    }

    constexpr std::uint64_t key() const noexcept { return key_; }
    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace stochcap
