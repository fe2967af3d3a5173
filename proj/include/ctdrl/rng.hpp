#pragma once

#include <cstdint>

#include "ctdrl/normal.hpp"

namespace ctdrl {

namespace detail {
// SplitMix64 finalizer. Full-avalanche mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}  // namespace detail

// Derive an independent sub-seed for a named stream (anchor index,
// experiment stage, ...). Stable across platforms and runs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return detail::mix64(seed ^ detail::mix64((stream + 1) * detail::kGolden));
}

// Counter-based random stream keyed by (seed, path index). Draw k of a
// stream is a pure function of (key, k), so results do not depend on
// thread count or schedule, and any path can be replayed in isolation.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t path)
        : key_(detail::mix64(seed) ^ detail::mix64((path + 1) * detail::kGolden)) {}

    // Uniform in the open interval (0,1).
    double next_uniform() {
        const std::uint64_t bits = detail::mix64(key_ + (++counter_) * detail::kGolden);
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return normal_quantile_fast(next_uniform()); }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ctdrl
