#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipfs/blockstore/blockstore.hpp"
#include "ipfs/common/bytes.hpp"
#include "ipfs/common/errors.hpp"
#include "ipfs/identity/identity.hpp"
#include "ipfs/multiformats/multihash.hpp"
#include "ipfs/routing/routing.hpp"

namespace ipfs::dag {

using multiformats::Multihash;

IPFS_DECLARE_ERROR(PublishError);
IPFS_DECLARE_ERROR(SignatureError);
IPFS_DECLARE_ERROR(KeyNotFound);
IPFS_DECLARE_ERROR(NoKey);
IPFS_DECLARE_ERROR(DecryptError);

class PathNotFound : public Error {
public:
    PathNotFound(std::size_t index, const std::string& component);
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class FetchError : public Error {
public:
    explicit FetchError(const Multihash& key, std::vector<Multihash> partial = {}, std::string detail = {});
    const Multihash& key() const noexcept { return key_; }
    // Results gathered before the failure, for operations that collect.
    const std::vector<Multihash>& partial() const noexcept { return partial_; }

private:
    Multihash key_;
    std::vector<Multihash> partial_;
};

struct DagLink {
    std::string name;
    Multihash hash;
    std::uint64_t size = 0;  // cumulative byte size of the target subgraph
    bool operator==(const DagLink&) const = default;
};

// Canonical layout:
//   varint(link_count)
//   per link: varint(name_len) name, varint(hash_len) multihash, varint(size)
//   varint(data_len) data
struct DagObject {
    std::vector<DagLink> links;
    Bytes data;

    Bytes encode() const;
    // Throws DecodeError (with byte offset) on malformed input.
    static DagObject decode(ByteView raw);
    Multihash key() const { return Multihash::of(encode()); }
    // Encoded length plus the sizes recorded on every link.
    std::uint64_t cumulative_size() const;
    // First link with exactly this name.
    const DagLink* find(std::string_view name) const;

    bool operator==(const DagObject&) const = default;
};

DagLink link_to(std::string name, const DagObject& target);

// JSON text form: {"data": ..., "links": [{"hash", "name", "size"}]}.
// Data that is valid UTF-8 is a string; anything else is {"hex": "..."}.
std::string to_json(const DagObject& obj, int indent = 2);
DagObject from_json(std::string_view text);

// --- object frames ---

using Keychain = std::map<Bytes, Bytes>;  // tag -> 32-byte symmetric key
constexpr std::size_t kKeyBytes = 32;

struct SignedObject {
    Bytes object;          // canonical bytes of the wrapped object
    Bytes signature;
    Multihash public_key;  // hash of the signer's key, itself stored as a block
    Bytes encode() const;
};

struct EncryptedObject {
    Bytes ciphertext;  // nonce followed by AEAD output
    Bytes tag;         // selects the keychain entry
    Bytes encode() const;
};

enum class FrameKind { plain, signed_object, encrypted_object };

// Frames start with a non-minimal varint, which no canonical object can,
// so the two byte spaces never overlap.
FrameKind frame_kind(ByteView raw);
SignedObject decode_signed(ByteView raw);
EncryptedObject decode_encrypted(ByteView raw);

// Stores the public key as a raw block so verifiers can resolve it.
SignedObject sign_object(const DagObject& obj, const identity::NodeIdentity& signer, blockstore::BlockStore& store);
Bytes make_key(ByteView seed);  // 32-byte key derived from arbitrary material
EncryptedObject encrypt_object(const DagObject& obj, ByteView key, ByteView tag);
DagObject decrypt_object(const EncryptedObject& enc, const Keychain& keychain);

// --- reading graphs ---

using BlockGetter = std::function<std::optional<Bytes>(const Multihash&)>;

BlockGetter store_getter(blockstore::BlockStore& store);

// Loads objects by key, transparently verifying signed frames and opening
// encrypted ones with the keychain. Counts fetches for instrumentation.
class DagReader {
public:
    explicit DagReader(BlockGetter getter, Keychain keychain = {})
        : getter_(std::move(getter)), keychain_(std::move(keychain)) {}

    std::optional<Bytes> block(const Multihash& key) const;
    // Throws FetchError if the block is unavailable.
    DagObject object(const Multihash& key) const;
    DagObject verify_signed(const SignedObject& signed_obj) const;

    std::size_t fetches() const { return fetches_; }
    void reset_fetches() { fetches_ = 0; }
    Keychain& keychain() { return keychain_; }

private:
    BlockGetter getter_;
    Keychain keychain_;
    mutable std::size_t fetches_ = 0;
};

Multihash put_object(blockstore::BlockStore& store, const DagObject& obj);

// Splits "a/b//c/" into {"a", "b", "c"}.
std::vector<std::string> split_path(std::string_view path);

Multihash resolve_path(const Multihash& root, const std::vector<std::string>& path, const DagReader& reader);
std::vector<DagLink> list_links(const Multihash& key, const DagReader& reader);
// Every key reachable from root (root excluded), preorder, each once.
std::vector<Multihash> refs_recursive(const Multihash& root, const DagReader& reader);

// Link enumeration for pinning; nullopt when a block is missing. Blocks that
// are not objects have no links.
blockstore::LinkResolver link_resolver(const DagReader& reader);

// Announces the key through routing. The object must already be stored.
Multihash publish(const DagObject& obj, blockstore::BlockStore& store, routing::Routing& routing);

// Checks recorded link sizes against locally available targets. Links whose
// targets are not available are skipped.
bool verify_link_sizes(const DagObject& obj, const DagReader& reader);

}  // namespace ipfs::dag
