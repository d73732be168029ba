#include "ipfs/identity/identity.hpp"

#include <sodium.h>

#include <bit>

namespace ipfs::identity {

namespace {

constexpr std::uint8_t kFileVersion = 1;
constexpr std::uint8_t kBlobPlain = 0;
constexpr std::uint8_t kBlobSealed = 1;

void ensure_sodium()
{
    static const bool ok = sodium_init() >= 0;
    if (!ok) throw KeyError("libsodium failed to initialise");
}

Bytes derive_file_key(std::string_view passphrase, ByteView salt)
{
    Bytes key(crypto_secretbox_KEYBYTES);
    if (crypto_pwhash(key.data(), key.size(), passphrase.data(), passphrase.size(), salt.data(),
                      crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE,
                      crypto_pwhash_ALG_ARGON2ID13) != 0)
        throw KeyError("passphrase key derivation failed");
    return key;
}

}  // namespace

NodeId derive_node_id(ByteView public_key)
{
    auto inner = multiformats::digest(multiformats::HashCode::sha2_256, public_key);
    return Multihash::of(inner);
}

int leading_zero_bits(ByteView digest)
{
    int bits = 0;
    for (auto b : digest) {
        if (b == 0) {
            bits += 8;
            continue;
        }
        return bits + std::countl_zero(b);
    }
    return bits;
}

Bytes Signature::encode() const
{
    Writer w;
    w.length_prefixed(signer.encode()).length_prefixed(payload_hash.encode()).length_prefixed(sig_bytes);
    return std::move(w).bytes();
}

Signature Signature::decode(ByteView raw)
{
    Reader r(raw);
    Signature s;
    s.signer = Multihash::decode(r.length_prefixed());
    s.payload_hash = Multihash::decode(r.length_prefixed());
    auto sig = r.length_prefixed();
    s.sig_bytes.assign(sig.begin(), sig.end());
    r.expect_done("signature");
    return s;
}

NodeIdentity NodeIdentity::generate(int difficulty, Rng& rng)
{
    if (difficulty < 0) throw DifficultyTooHigh("difficulty must be non-negative");
    if (difficulty > kMaxDifficulty)
        throw DifficultyTooHigh("difficulty " + std::to_string(difficulty) + " exceeds guard of " +
                                std::to_string(kMaxDifficulty));
    for (;;) {
        auto id = from_private_key(rng.bytes(kPrivateKeyBytes));
        if (leading_zero_bits(id.node_id_.digest()) >= difficulty) return id;
    }
}

NodeIdentity NodeIdentity::from_private_key(ByteView seed)
{
    ensure_sodium();
    if (seed.size() != kPrivateKeyBytes) throw KeyError("private key must be 32 bytes");
    NodeIdentity id;
    id.seed_.assign(seed.begin(), seed.end());
    id.public_key_.resize(crypto_sign_PUBLICKEYBYTES);
    id.secret_key_.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(id.public_key_.data(), id.secret_key_.data(), id.seed_.data());
    id.node_id_ = derive_node_id(id.public_key_);
    return id;
}

Bytes NodeIdentity::sign_raw(ByteView payload) const
{
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, payload.data(), payload.size(), secret_key_.data());
    return sig;
}

Signature NodeIdentity::sign(ByteView payload) const
{
    return Signature{node_id_, Multihash::of(payload), sign_raw(payload)};
}

Bytes NodeIdentity::save(std::string_view passphrase, Rng& rng) const
{
    Writer blob;
    if (passphrase.empty()) {
        blob.byte(kBlobPlain).raw(seed_);
    } else {
        auto salt = rng.bytes(crypto_pwhash_SALTBYTES);
        auto nonce = rng.bytes(crypto_secretbox_NONCEBYTES);
        auto key = derive_file_key(passphrase, salt);
        Bytes sealed(seed_.size() + crypto_secretbox_MACBYTES);
        crypto_secretbox_easy(sealed.data(), seed_.data(), seed_.size(), nonce.data(), key.data());
        sodium_memzero(key.data(), key.size());
        blob.byte(kBlobSealed).raw(salt).raw(nonce).raw(sealed);
    }
    Writer w;
    w.byte(kFileVersion).raw(node_id_.encode()).length_prefixed(public_key_).length_prefixed(blob.bytes());
    return std::move(w).bytes();
}

NodeIdentity NodeIdentity::load(ByteView file, std::string_view passphrase)
{
    ensure_sodium();
    Reader r(file);
    if (r.byte() != kFileVersion) throw KeyError("unsupported identity file version");
    std::size_t used = 0;
    auto node_id = Multihash::decode_prefix(r.rest(), used);
    r.skip(used);
    auto pk = r.length_prefixed();
    auto blob = r.length_prefixed();
    r.expect_done("identity file");

    Reader b(blob);
    Bytes seed;
    switch (b.byte()) {
    case kBlobPlain: {
        auto s = b.take(kPrivateKeyBytes);
        seed.assign(s.begin(), s.end());
        break;
    }
    case kBlobSealed: {
        auto salt = b.take(crypto_pwhash_SALTBYTES);
        auto nonce = b.take(crypto_secretbox_NONCEBYTES);
        auto sealed = b.take(kPrivateKeyBytes + crypto_secretbox_MACBYTES);
        if (passphrase.empty()) throw KeyError("identity is encrypted; passphrase required");
        auto key = derive_file_key(passphrase, salt);
        seed.resize(kPrivateKeyBytes);
        int rc = crypto_secretbox_open_easy(seed.data(), sealed.data(), sealed.size(), nonce.data(), key.data());
        sodium_memzero(key.data(), key.size());
        if (rc != 0) throw KeyError("wrong passphrase or corrupted identity file");
        break;
    }
    default:
        throw KeyError("unknown private key blob format");
    }
    b.expect_done("private key blob");

    auto id = from_private_key(seed);
    sodium_memzero(seed.data(), seed.size());
    if (!std::equal(pk.begin(), pk.end(), id.public_key_.begin(), id.public_key_.end()) || id.node_id_ != node_id)
        throw KeyError("identity file keys do not match its node id");
    return id;
}

bool verify_peer(const NodeId& claimed_id, ByteView public_key, int difficulty)
{
    if (public_key.size() != kPublicKeyBytes) return false;
    if (derive_node_id(public_key) != claimed_id) return false;
    return leading_zero_bits(claimed_id.digest()) >= difficulty;
}

bool verify_raw(ByteView public_key, ByteView payload, ByteView sig)
{
    ensure_sodium();
    if (public_key.size() != kPublicKeyBytes) throw KeyError("public key must be 32 bytes");
    if (sig.size() != kSignatureBytes) return false;
    return crypto_sign_verify_detached(sig.data(), payload.data(), payload.size(), public_key.data()) == 0;
}

bool verify_sig(ByteView public_key, ByteView payload, const Signature& sig)
{
    if (public_key.size() != kPublicKeyBytes) throw KeyError("public key must be 32 bytes");
    if (derive_node_id(public_key) != sig.signer) return false;
    if (!sig.payload_hash.verify(payload)) return false;
    return verify_raw(public_key, payload, sig.sig_bytes);
}

}  // namespace ipfs::identity
