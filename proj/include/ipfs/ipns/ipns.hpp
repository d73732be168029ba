#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ipfs/blockstore/blockstore.hpp"
#include "ipfs/common/time.hpp"
#include "ipfs/identity/identity.hpp"
#include "ipfs/merkledag/dag.hpp"
#include "ipfs/routing/routing.hpp"

namespace ipfs::ipns {

using identity::NodeId;
using identity::NodeIdentity;
using multiformats::Multihash;

IPFS_DECLARE_ERROR(NameAuthError);
IPFS_DECLARE_ERROR(NameNotFound);
IPFS_DECLARE_ERROR(RecursionLimit);
IPFS_DECLARE_ERROR(NameError);
IPFS_DECLARE_ERROR(RecordTooLarge);
IPFS_DECLARE_ERROR(LengthError);
IPFS_DECLARE_ERROR(AlphabetError);
IPFS_DECLARE_ERROR(PathSyntaxError);

constexpr std::size_t kDefaultDepthLimit = 32;
constexpr SimTime kDefaultValidity = std::chrono::hours(24);

// Signed pointer from a NodeId to an object. Wire form:
//   0x01, lp(publisher), lp(value), varint(sequence), varint(expires_us),
//   lp(public_key), lp(signature)
// and never more than routing::kMaxValueBytes.
struct NameRecord {
    NodeId publisher;
    Multihash value;
    std::uint64_t sequence = 0;
    SimTime expires{0};  // virtual time after which the record is void
    Bytes public_key;
    Bytes signature;

    static NameRecord make(const NodeIdentity& publisher, const Multihash& value, std::uint64_t sequence,
                           SimTime expires);
    Bytes signing_payload() const;
    // Key binding and signature; never throws.
    bool verify() const;
    Bytes encode() const;  // RecordTooLarge past the routing value limit
    static NameRecord decode(ByteView raw);
    bool operator==(const NameRecord&) const = default;
};

Bytes name_key(const NodeId& publisher);

// "/ipfs/<hash>/rest" or "/ipns/<head>/rest". A path with no namespace
// prefix is read as /ipfs.
struct NamePath {
    enum class Space { ipfs, ipns };
    Space space = Space::ipfs;
    std::string head;
    std::vector<std::string> rest;

    static NamePath parse(std::string_view text);  // PathSyntaxError
    std::string to_string() const;
    bool operator==(const NamePath&) const = default;
};

// Pronounceable identifiers: 16 bits per consonant-vowel word.
std::string proquint_encode(ByteView data);  // LengthError on odd length
Bytes proquint_decode(std::string_view text);  // LengthError, AlphabetError
bool looks_like_proquint(std::string_view text);

class DnsResolver {
public:
    virtual ~DnsResolver() = default;
    virtual std::vector<std::string> txt(std::string_view domain) const = 0;
};

// TXT records from "domain<TAB>value" lines; '#' starts a comment.
class FixtureDns : public DnsResolver {
public:
    static FixtureDns parse(std::string_view text);
    static FixtureDns load(const std::string& path);
    void add(std::string_view domain, std::string value);
    std::vector<std::string> txt(std::string_view domain) const override;

private:
    std::map<std::string, std::vector<std::string>> records_;
};

bool is_domain(std::string_view text);

// Publishes value under the identity's name with sequence one past the
// highest valid record routing can see.
NameRecord publish_name(const NodeIdentity& identity, const Multihash& value, routing::Routing& routing,
                        SimTime now = SimTime{0}, SimTime validity = kDefaultValidity);

// Valid records for a NodeId, best first. Throws NameAuthError when records
// exist but none verifies, NameNotFound when there are none.
std::vector<NameRecord> lookup_records(const NodeId& id, routing::Routing& routing, SimTime now);

struct Resolver {
    routing::Routing* routing = nullptr;
    const dag::DagReader* reader = nullptr;
    const DnsResolver* dns = nullptr;
    SimTime now{0};
    std::size_t depth_limit = kDefaultDepthLimit;

    // Follows names, DNS, proquints and peer links down to an object key.
    Multihash resolve(const NamePath& path) const;
    Multihash resolve(std::string_view path) const { return resolve(NamePath::parse(path)); }
    // The key an /ipns head currently points to, before path components.
    Multihash resolve_name(const NodeId& id) const;

private:
    Multihash resolve_at(const NamePath& path, std::size_t depth) const;
    Multihash walk(const Multihash& root, const std::vector<std::string>& rest, std::size_t depth) const;
};

// Adds a peer link at path (for example {"friends", "bob"}) in the owner's
// published tree and republishes it. NameError if the name is taken.
Multihash peer_link(const NodeIdentity& owner, const std::vector<std::string>& path, const NodeId& target,
                    blockstore::BlockStore& store, const Resolver& resolver);

// Wraps value in a commit whose parent is the previously published commit,
// then publishes the commit.
NameRecord publish_with_history(const NodeIdentity& identity, const Multihash& value, blockstore::BlockStore& store,
                                const Resolver& resolver, std::string message, std::string date);

}  // namespace ipfs::ipns
