#include "ipfs/common/rng.hpp"

#include <limits>
#include <stdexcept>

namespace ipfs {

std::uint64_t Rng::uniform(std::uint64_t bound)
{
    if (bound == 0) throw std::invalid_argument("Rng::uniform: zero bound");
    // Rejection sampling keeps the result unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % bound;
}

std::int64_t Rng::uniform_range(std::int64_t lo, std::int64_t hi)
{
    if (hi < lo) throw std::invalid_argument("Rng::uniform_range: empty range");
    auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());
    return lo + static_cast<std::int64_t>(uniform(span));
}

void Rng::fill(std::span<std::uint8_t> out)
{
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t x = next_u64();
        for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
            out[i] = static_cast<std::uint8_t>(x);
            x >>= 8;
        }
    }
}

Bytes Rng::bytes(std::size_t n)
{
    Bytes out(n);
    fill(out);
    return out;
}

}  // namespace ipfs
