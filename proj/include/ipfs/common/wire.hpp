#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ipfs/common/bytes.hpp"
#include "ipfs/common/errors.hpp"

namespace ipfs {

IPFS_DECLARE_ERROR(TruncatedError);

// Raised by Reader on malformed input; offset() is the byte position where
// decoding failed.
class DecodeError : public Error {
public:
    DecodeError(const std::string& what, std::size_t offset)
        : Error("DecodeError", what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Unsigned LEB128. Encoders always emit the minimal form; decoders reject
// non-minimal encodings so every value has exactly one byte string.
void put_uvarint(Bytes& out, std::uint64_t value);
Bytes uvarint(std::uint64_t value);

// Decodes a varint of at most max_bytes bytes from the front of in.
// Throws TruncatedError if the input ends mid-varint, DecodeError if it is
// overlong or non-minimal.
std::uint64_t get_uvarint(ByteView in, std::size_t& consumed, std::size_t max_bytes = 10);

// Sequential reader over a frame; every failure reports its offset.
class Reader {
public:
    explicit Reader(ByteView in) : in_(in) {}

    std::uint64_t uvarint(std::size_t max_bytes = 10);
    std::uint8_t byte();
    ByteView take(std::size_t n);
    ByteView length_prefixed();
    std::string string();

    bool done() const { return pos_ == in_.size(); }
    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return in_.size() - pos_; }
    ByteView rest() const { return in_.subspan(pos_); }
    void skip(std::size_t n) { take(n); }

    // Throws DecodeError if unread bytes remain.
    void expect_done(const char* what) const;

    [[noreturn]] void fail(const std::string& what) const { throw DecodeError(what, pos_); }

private:
    ByteView in_;
    std::size_t pos_ = 0;
};

class Writer {
public:
    Writer& byte(std::uint8_t b) { out_.push_back(b); return *this; }
    Writer& uvarint(std::uint64_t v) { put_uvarint(out_, v); return *this; }
    Writer& raw(ByteView b) { append(out_, b); return *this; }
    Writer& length_prefixed(ByteView b) { uvarint(b.size()); return raw(b); }
    Writer& string(std::string_view s) { return length_prefixed(as_view(s)); }

    const Bytes& bytes() const& { return out_; }
    Bytes bytes() && { return std::move(out_); }

private:
    Bytes out_;
};

}  // namespace ipfs
