#include <bit>
#include <cmath>

#include "ipfs/files/files.hpp"

namespace ipfs::files {

namespace {

int degree(std::uint64_t p) { return 63 - std::countl_zero(p); }

std::uint64_t mod(std::uint64_t x, std::uint64_t p)
{
    int dp = degree(p);
    while (x != 0 && degree(x) >= dp) x ^= p << (degree(x) - dp);
    return x;
}

std::uint64_t append_byte(std::uint64_t h, std::uint8_t b, std::uint64_t p) { return mod((h << 8) | b, p); }

}  // namespace

FixedChunker::FixedChunker(std::size_t size) : size_(size)
{
    if (size == 0) throw ParamError("fixed chunk size must be positive");
}

std::vector<std::size_t> FixedChunker::boundaries(ByteView data) const
{
    std::vector<std::size_t> out;
    for (std::size_t end = size_; end < data.size(); end += size_) out.push_back(end);
    out.push_back(data.size());
    return out;
}

std::string FixedChunker::describe() const { return "fixed-" + std::to_string(size_); }

RabinChunker::RabinChunker(RabinParams params) : params_(params)
{
    const auto& p = params_;
    if (!(p.min > 0 && p.min < p.avg && p.avg < p.max))
        throw ParamError("rabin sizes must satisfy 0 < min < avg < max");
    if (p.window == 0 || p.window > p.min) throw ParamError("rabin window must be in [1, min]");
    int deg = p.polynomial == 0 ? -1 : degree(p.polynomial);
    if (deg < 9 || deg > 55) throw ParamError("rabin polynomial degree must be in [9, 55]");
    auto bits = std::lround(std::log2(static_cast<double>(p.avg - p.min)));
    if (bits < 1 || bits >= deg) throw ParamError("rabin average is out of range for the polynomial");
    mask_ = (std::uint64_t{1} << bits) - 1;
    shift_ = deg - 8;

    for (int b = 0; b < 256; ++b) {
        std::uint64_t h = append_byte(0, static_cast<std::uint8_t>(b), p.polynomial);
        for (std::size_t i = 0; i + 1 < p.window; ++i) h = append_byte(h, 0, p.polynomial);
        out_table_[b] = h;
        std::uint64_t high = std::uint64_t(b) << deg;
        mod_table_[b] = mod(high, p.polynomial) | high;
    }
}

std::vector<std::size_t> RabinChunker::boundaries(ByteView data) const
{
    const auto& p = params_;
    std::vector<std::size_t> out;
    std::vector<std::uint8_t> window(p.window);
    std::size_t start = 0;
    while (data.size() - start > p.min) {
        // The fingerprint depends only on the trailing window, so hashing can
        // begin window bytes before the earliest legal cut.
        std::fill(window.begin(), window.end(), 0);
        std::size_t wpos = 0;
        std::uint64_t digest = 0;
        std::size_t limit = std::min(data.size(), start + p.max);
        std::size_t cut = limit;
        for (std::size_t i = start + p.min - p.window; i < limit; ++i) {
            std::uint8_t b = data[i];
            digest ^= out_table_[window[wpos]];
            window[wpos] = b;
            wpos = wpos + 1 == p.window ? 0 : wpos + 1;
            std::uint64_t index = digest >> shift_;
            digest = ((digest << 8) | b) ^ mod_table_[index];
            if (i + 1 - start >= p.min && (digest & mask_) == mask_) {
                cut = i + 1;
                break;
            }
        }
        if (cut == data.size()) break;
        out.push_back(cut);
        start = cut;
    }
    out.push_back(data.size());
    return out;
}

std::string RabinChunker::describe() const
{
    return "rabin-" + std::to_string(params_.min) + "-" + std::to_string(params_.avg) + "-" +
           std::to_string(params_.max);
}

std::vector<std::size_t> chunk_rabin(ByteView data, const RabinParams& params)
{
    return RabinChunker(params).boundaries(data);
}

}  // namespace ipfs::files
