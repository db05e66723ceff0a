#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace pgdlab {

/**
 * Counter-based splittable generator. The i-th output of a stream with key k is
 * splitmix64_mix(k + (i + 1) * gamma), so any draw is addressable by (key, counter) and child
 * streams are derived by mixing the parent key with a stream id.
 *
 * Satisfies UniformRandomBitGenerator, so <random> distributions can sit on top of it.
 */
class CounterRng {
public:
    using result_type = std::uint64_t;

    static constexpr std::string_view algorithm_id = "splitmix64-counter-v1";

    explicit CounterRng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * gamma); }

    /// Independent child stream; equal (parent key, stream) pairs give equal children.
    CounterRng split(std::uint64_t stream) const
    {
        CounterRng child;
        child.key_ = mix(key_ ^ mix(stream + 0x3c6ef372fe94f82bULL));
        return child;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace pgdlab
