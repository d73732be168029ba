#include "ipfs/common/wire.hpp"

namespace ipfs {

void put_uvarint(Bytes& out, std::uint64_t value)
{
    while (value >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(value | 0x80));
        value >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(value));
}

Bytes uvarint(std::uint64_t value)
{
    Bytes out;
    put_uvarint(out, value);
    return out;
}

std::uint64_t get_uvarint(ByteView in, std::size_t& consumed, std::size_t max_bytes)
{
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < max_bytes; ++i) {
        if (i >= in.size()) throw TruncatedError("varint truncated");
        std::uint8_t b = in[i];
        if (i == 9 && b > 1) throw DecodeError("varint overflows 64 bits", i);
        value |= static_cast<std::uint64_t>(b & 0x7f) << (7 * i);
        if ((b & 0x80) == 0) {
            if (b == 0 && i > 0) throw DecodeError("non-minimal varint", i);
            consumed = i + 1;
            return value;
        }
    }
    throw DecodeError("varint longer than " + std::to_string(max_bytes) + " bytes", max_bytes);
}

std::uint64_t Reader::uvarint(std::size_t max_bytes)
{
    std::size_t used = 0;
    try {
        auto v = get_uvarint(rest(), used, max_bytes);
        pos_ += used;
        return v;
    } catch (const TruncatedError&) {
        fail("truncated varint");
    } catch (const DecodeError& e) {
        throw DecodeError("bad varint", pos_ + e.offset());
    }
}

std::uint8_t Reader::byte()
{
    if (pos_ >= in_.size()) fail("unexpected end of input");
    return in_[pos_++];
}

ByteView Reader::take(std::size_t n)
{
    if (n > remaining()) fail("field of " + std::to_string(n) + " bytes exceeds input");
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
}

ByteView Reader::length_prefixed()
{
    auto n = uvarint();
    return take(static_cast<std::size_t>(n));
}

std::string Reader::string()
{
    auto b = length_prefixed();
    return std::string(b.begin(), b.end());
}

void Reader::expect_done(const char* what) const
{
    if (!done()) fail(std::string("trailing bytes after ") + what);
}

}  // namespace ipfs
