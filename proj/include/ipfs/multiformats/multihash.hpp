#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "ipfs/common/bytes.hpp"
#include "ipfs/common/errors.hpp"
#include "ipfs/common/wire.hpp"

namespace ipfs::multiformats {

IPFS_DECLARE_ERROR(RegistryError);
IPFS_DECLARE_ERROR(LengthMismatch);
IPFS_DECLARE_ERROR(AlphabetError);
IPFS_DECLARE_ERROR(PayloadError);
using ::ipfs::TruncatedError;

// Hash function registry. SHA-1 is recognised for decoding only: there is
// no hashing routine behind it.
enum class HashCode : std::uint64_t {
    identity = 0x00,
    sha1 = 0x11,
    sha2_256 = 0x12,
    sha2_512 = 0x13,
};

constexpr HashCode kDefaultHash = HashCode::sha2_256;

// Varint headers (function code, digest length) are capped at 4 bytes.
constexpr std::size_t kMaxHeaderVarintBytes = 4;

bool is_registered(std::uint64_t code);
std::string_view hash_name(std::uint64_t code);

// Full digest length for a registered code; nullopt for identity, which is
// bounded only by the header varint.
std::optional<std::size_t> defined_length(std::uint64_t code);

// Raw digest of data under a computable function. identity returns the data
// itself; sha1 and unregistered codes throw RegistryError.
Bytes digest(HashCode code, ByteView data);

// Self-describing hash: <varint code><varint length><digest>.
class Multihash {
public:
    Multihash() = default;

    // Validates against the registry (RegistryError / LengthMismatch).
    Multihash(std::uint64_t code, Bytes digest);

    // Hash data and wrap the digest.
    static Multihash of(ByteView data, HashCode code = kDefaultHash);

    // Inverse of encode(): the whole input must be one multihash. Unregistered
    // function codes decode, but known() is false and verify() refuses them.
    static Multihash decode(ByteView raw);

    // Reads one multihash from the front of a longer buffer.
    static Multihash decode_prefix(ByteView raw, std::size_t& consumed);

    Bytes encode() const;

    std::uint64_t code() const { return code_; }
    const Bytes& digest() const { return digest_; }
    std::size_t digest_length() const { return digest_.size(); }
    bool known() const { return is_registered(code_); }
    bool empty() const { return digest_.empty(); }

    // Recomputes the digest of data under this multihash's function and
    // compares. A truncated digest matches the prefix of the full one.
    bool verify(ByteView data) const;

    // Base58 text form of the encoded bytes.
    std::string to_string() const;

    // Base58, with lowercase hex accepted as a fallback when the base58
    // reading is not a valid multihash.
    static Multihash parse(std::string_view text);

    auto operator<=>(const Multihash&) const = default;
    bool operator==(const Multihash&) const = default;

private:
    std::uint64_t code_ = 0;
    Bytes digest_;
};

// Low-level encode/decode matching the registry contract.
Bytes multihash_encode(std::uint64_t code, ByteView digest);
Multihash multihash_decode(ByteView raw);

}  // namespace ipfs::multiformats

template <>
struct std::hash<ipfs::multiformats::Multihash> {
    std::size_t operator()(const ipfs::multiformats::Multihash& m) const noexcept;
};
