#pragma once

#include <string_view>

#include "ipfs/common/bytes.hpp"
#include "ipfs/common/errors.hpp"
#include "ipfs/common/rng.hpp"
#include "ipfs/multiformats/multihash.hpp"

namespace ipfs::identity {

using multiformats::Multihash;
using NodeId = multiformats::Multihash;

IPFS_DECLARE_ERROR(DifficultyTooHigh);
IPFS_DECLARE_ERROR(KeyError);

// Static puzzle guard; generation cost doubles per bit.
constexpr int kMaxDifficulty = 24;

constexpr std::size_t kPublicKeyBytes = 32;
constexpr std::size_t kPrivateKeyBytes = 32;
constexpr std::size_t kSignatureBytes = 64;

// NodeId = H(H(public_key)): the inner hash is the raw SHA-256 digest of the
// key, the outer one is wrapped as a multihash.
NodeId derive_node_id(ByteView public_key);

// Leading zero bits of the digest (multihash header excluded).
int leading_zero_bits(ByteView digest);

struct Signature {
    NodeId signer;
    Multihash payload_hash;
    Bytes sig_bytes;

    Bytes encode() const;
    static Signature decode(ByteView raw);

    bool operator==(const Signature&) const = default;
};

// Ed25519 keypair plus its puzzle-derived NodeId. The private key is the
// 32-byte Ed25519 seed; signing is deterministic.
class NodeIdentity {
public:
    // Regenerates keypairs from rng until the NodeId has at least
    // `difficulty` leading zero bits.
    static NodeIdentity generate(int difficulty, Rng& rng);

    // Keypair from an explicit 32-byte seed, no puzzle applied.
    static NodeIdentity from_private_key(ByteView seed);

    const NodeId& node_id() const { return node_id_; }
    const Bytes& public_key() const { return public_key_; }
    const Bytes& private_key() const { return seed_; }

    Signature sign(ByteView payload) const;
    Bytes sign_raw(ByteView payload) const;

    // Identity file: version byte, node_id multihash, varint-length public
    // key, varint-length private key blob. A non-empty passphrase encrypts the
    // blob under an Argon2id-derived key; an empty one stores it in the clear.
    Bytes save(std::string_view passphrase, Rng& rng) const;
    static NodeIdentity load(ByteView file, std::string_view passphrase);

private:
    NodeIdentity() = default;

    NodeId node_id_;
    Bytes public_key_;
    Bytes seed_;
    Bytes secret_key_;  // libsodium's expanded form (seed || public key)
};

// Accept iff H(H(public_key)) == claimed_id and the id meets the difficulty.
bool verify_peer(const NodeId& claimed_id, ByteView public_key, int difficulty);

// Throws KeyError if public_key is not a well-formed key.
bool verify_sig(ByteView public_key, ByteView payload, const Signature& sig);
bool verify_raw(ByteView public_key, ByteView payload, ByteView sig);

}  // namespace ipfs::identity
