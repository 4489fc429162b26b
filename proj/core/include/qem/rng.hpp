#pragma once

#include <cstdint>

#include "qem/special_functions.hpp"

namespace qem {

/// Counter-based uniform stream: a pure keyed hash of (key, a, b, c).
/// The same key and counters give the same value on every run, values at
/// distinct counters are independent for Monte Carlo purposes, and there
/// is no sequential state, so callers may evaluate counters in any order
/// or concurrently.
class CounterStream {
public:
    explicit CounterStream(std::uint64_t key) : key_(key) {}

    /// Strictly inside (0,1).
    double uniform01(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
        std::uint64_t h = mix64(key_ ^ 0x243F6A8885A308D3ULL);
        h = mix64(h ^ a);
        h = mix64(h ^ b);
        h = mix64(h ^ c);
        return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t key() const noexcept { return key_; }

    /// Decorrelates streams that share a user seed but serve different
    /// purposes (e.g. data simulation vs. MCEM draws).
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_tag) {
        return mix64(mix64(seed ^ 0x9E3779B97F4A7C15ULL) ^ stream_tag);
    }

private:
    std::uint64_t key_;
};

} // namespace qem
