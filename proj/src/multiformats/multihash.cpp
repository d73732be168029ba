#include "ipfs/multiformats/multihash.hpp"

#include <sodium.h>

#include <algorithm>

#include "ipfs/multiformats/base58.hpp"

namespace ipfs::multiformats {

namespace {

struct RegistryEntry {
    HashCode code;
    std::string_view name;
    std::size_t length;  // 0 = unbounded (identity)
};

constexpr RegistryEntry kRegistry[] = {
    {HashCode::identity, "identity", 0},
    {HashCode::sha1, "sha1", 20},
    {HashCode::sha2_256, "sha2-256", 32},
    {HashCode::sha2_512, "sha2-512", 64},
};

const RegistryEntry* find_entry(std::uint64_t code)
{
    for (const auto& e : kRegistry)
        if (static_cast<std::uint64_t>(e.code) == code) return &e;
    return nullptr;
}

void ensure_sodium()
{
    static const bool ok = sodium_init() >= 0;
    if (!ok) throw RegistryError("libsodium failed to initialise");
}

// Header decoding shared by decode() and decode_prefix(). Returns the code
// and digest length and advances pos past the header.
std::pair<std::uint64_t, std::size_t> read_header(ByteView raw, std::size_t& pos)
{
    if (raw.size() < 2) throw TruncatedError("multihash needs at least 2 bytes");
    std::size_t used = 0;
    std::uint64_t code;
    std::uint64_t len;
    try {
        code = get_uvarint(raw, used, kMaxHeaderVarintBytes);
        pos = used;
        len = get_uvarint(raw.subspan(pos), used, kMaxHeaderVarintBytes);
        pos += used;
    } catch (const DecodeError& e) {
        throw LengthMismatch(std::string("malformed multihash header: ") + e.what());
    }
    return {code, static_cast<std::size_t>(len)};
}

void check_digest(std::uint64_t code, std::size_t len)
{
    if (len == 0) throw LengthMismatch("multihash digest must be non-empty");
    if (len >= (1u << (7 * kMaxHeaderVarintBytes)))
        throw LengthMismatch("digest length does not fit the header varint");
    if (auto* e = find_entry(code); e && e->length != 0 && len > e->length)
        throw LengthMismatch("digest of " + std::to_string(len) + " bytes exceeds " +
                             std::string(e->name) + " length " + std::to_string(e->length));
}

}  // namespace

bool is_registered(std::uint64_t code) { return find_entry(code) != nullptr; }

std::string_view hash_name(std::uint64_t code)
{
    auto* e = find_entry(code);
    return e ? e->name : std::string_view("unknown");
}

std::optional<std::size_t> defined_length(std::uint64_t code)
{
    auto* e = find_entry(code);
    if (!e || e->length == 0) return std::nullopt;
    return e->length;
}

Bytes digest(HashCode code, ByteView data)
{
    switch (code) {
    case HashCode::identity:
        return Bytes(data.begin(), data.end());
    case HashCode::sha2_256: {
        ensure_sodium();
        Bytes out(crypto_hash_sha256_BYTES);
        crypto_hash_sha256(out.data(), data.data(), data.size());
        return out;
    }
    case HashCode::sha2_512: {
        ensure_sodium();
        Bytes out(crypto_hash_sha512_BYTES);
        crypto_hash_sha512(out.data(), data.data(), data.size());
        return out;
    }
    case HashCode::sha1:
        throw RegistryError("sha1 is registered for decoding only");
    }
    throw RegistryError("unregistered hash function");
}

Multihash::Multihash(std::uint64_t code, Bytes digest) : code_(code), digest_(std::move(digest))
{
    if (!is_registered(code)) throw RegistryError("unregistered hash function code " + std::to_string(code));
    check_digest(code, digest_.size());
}

Multihash Multihash::of(ByteView data, HashCode code)
{
    return Multihash(static_cast<std::uint64_t>(code), multiformats::digest(code, data));
}

Multihash Multihash::decode_prefix(ByteView raw, std::size_t& consumed)
{
    std::size_t pos = 0;
    auto [code, len] = read_header(raw, pos);
    check_digest(code, len);
    if (raw.size() - pos < len) throw LengthMismatch("declared digest length exceeds input");
    Multihash m;
    m.code_ = code;
    m.digest_.assign(raw.begin() + pos, raw.begin() + pos + len);
    consumed = pos + len;
    return m;
}

Multihash Multihash::decode(ByteView raw)
{
    std::size_t pos = 0;
    auto [code, len] = read_header(raw, pos);
    if (raw.size() - pos != len)
        throw LengthMismatch("declared digest length " + std::to_string(len) + " but " +
                             std::to_string(raw.size() - pos) + " bytes follow");
    check_digest(code, len);
    Multihash m;
    m.code_ = code;
    m.digest_.assign(raw.begin() + pos, raw.end());
    return m;
}

Bytes Multihash::encode() const
{
    Bytes out;
    out.reserve(digest_.size() + 4);
    put_uvarint(out, code_);
    put_uvarint(out, digest_.size());
    append(out, digest_);
    return out;
}

bool Multihash::verify(ByteView data) const
{
    if (!known() || code_ == static_cast<std::uint64_t>(HashCode::sha1) || digest_.empty()) return false;
    auto full = multiformats::digest(static_cast<HashCode>(code_), data);
    if (code_ == static_cast<std::uint64_t>(HashCode::identity)) return full == digest_;
    if (digest_.size() > full.size()) return false;
    return std::equal(digest_.begin(), digest_.end(), full.begin());
}

std::string Multihash::to_string() const { return base_display(encode()); }

Multihash Multihash::parse(std::string_view text)
{
    try {
        return decode(base_parse(text));
    } catch (const Error&) {
        if (!is_hex(text)) throw;
        for (char c : text)
            if (c >= 'A' && c <= 'F') throw;
        return decode(from_hex(text));
    }
}

Bytes multihash_encode(std::uint64_t code, ByteView digest)
{
    return Multihash(code, Bytes(digest.begin(), digest.end())).encode();
}

Multihash multihash_decode(ByteView raw) { return Multihash::decode(raw); }

}  // namespace ipfs::multiformats

std::size_t std::hash<ipfs::multiformats::Multihash>::operator()(
    const ipfs::multiformats::Multihash& m) const noexcept
{
    // FNV-1a over code and digest.
    std::size_t h = 1469598103934665603ULL ^ static_cast<std::size_t>(m.code());
    for (auto b : m.digest()) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}
