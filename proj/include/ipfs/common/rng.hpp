#pragma once

#include <cstdint>
#include <random>

#include "ipfs/common/bytes.hpp"

namespace ipfs {

// Seedable deterministic generator. The std distributions are not portable
// across standard libraries, so every derived quantity is computed here from
// raw 64-bit engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound); bound must be non-zero.
    std::uint64_t uniform(std::uint64_t bound);

    // Uniform in [lo, hi] inclusive.
    std::int64_t uniform_range(std::int64_t lo, std::int64_t hi);

    // Uniform double in [0, 1) with 53 bits of precision.
    double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform_real() < p; }

    void fill(std::span<std::uint8_t> out);
    Bytes bytes(std::size_t n);

    // Independent child stream derived from this one.
    Rng fork() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ULL); }

private:
    std::mt19937_64 engine_;
};

}  // namespace ipfs
