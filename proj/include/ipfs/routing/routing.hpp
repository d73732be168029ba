#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipfs/common/bytes.hpp"
#include "ipfs/common/errors.hpp"
#include "ipfs/identity/identity.hpp"
#include "ipfs/multiformats/multiaddr.hpp"
#include "ipfs/multiformats/multihash.hpp"

namespace ipfs::routing {

using identity::NodeId;
using identity::NodeIdentity;
using multiformats::Multiaddr;
using multiformats::Multihash;

IPFS_DECLARE_ERROR(ValueTooLarge);
IPFS_DECLARE_ERROR(RoutingError);

// Values at or below this size live directly in the routing layer; larger
// data is reached through provider records.
constexpr std::size_t kMaxValueBytes = 1024;
constexpr std::size_t kMaxKeyBytes = 256;

struct PeerInfo {
    NodeId id;
    Multiaddr addr;
    bool operator==(const PeerInfo&) const = default;
};

// Small signed value. The publisher is identified by its public key; the
// NodeId is derived from it, so a record cannot name someone else as its
// publisher without their key.
struct ValueRecord {
    Bytes key;
    Bytes value;
    Bytes publisher_key;
    std::uint64_t sequence = 0;
    Bytes signature;

    static ValueRecord make(const NodeIdentity& publisher, ByteView key, ByteView value, std::uint64_t sequence);

    NodeId publisher() const { return identity::derive_node_id(publisher_key); }
    Bytes signing_payload() const;
    // Signature check, size limits and key well-formedness. Never throws.
    bool verify() const;

    Bytes encode() const;
    static ValueRecord decode(ByteView raw);

    bool operator==(const ValueRecord&) const = default;
};

// Highest sequence wins; ties go to the larger hash of the value bytes.
bool supersedes(const ValueRecord& a, const ValueRecord& b);
std::optional<ValueRecord> best_record(const std::vector<ValueRecord>& records);

struct ProviderResult {
    std::vector<PeerInfo> providers;
    bool shortfall = false;  // fewer than the requested minimum were found
};

// Peer and content location. Calls block the caller until the answer is
// known; in a simulation they drive the event loop, so they must not be
// called from inside a network event handler.
class Routing {
public:
    virtual ~Routing() = default;

    virtual const NodeId& self() const = 0;
    virtual std::optional<Multiaddr> find_peer(const NodeId& target) = 0;

    // Signs a record under this node's identity and stores it. Returns the
    // number of replicas that accepted it (including the local copy).
    virtual std::size_t set_value(ByteView key, ByteView value, std::uint64_t sequence) = 0;
    // Every verified record reachable for key.
    virtual std::vector<ValueRecord> get_values(ByteView key) = 0;
    std::optional<ValueRecord> get_value(ByteView key) { return best_record(get_values(key)); }

    virtual void provide(const Multihash& key) = 0;
    virtual ProviderResult find_value_peers(const Multihash& key, std::size_t min) = 0;
};

// Shared table standing in for a whole network; every MemoryRouting bound to
// the same hub sees the same records. Can be persisted for the CLI.
class MemoryRoutingHub {
public:
    void add_peer(const PeerInfo& peer) { peers_[peer.id] = peer.addr; }
    std::optional<Multiaddr> peer(const NodeId& id) const;

    // Applies the same acceptance rule as a DHT storer.
    bool store(const ValueRecord& record);
    std::vector<ValueRecord> values(ByteView key) const;

    void add_provider(const Multihash& key, const PeerInfo& provider);
    std::vector<PeerInfo> providers(const Multihash& key) const;

    Bytes encode() const;
    static MemoryRoutingHub decode(ByteView raw);

private:
    std::map<NodeId, Multiaddr> peers_;
    std::map<Bytes, std::map<NodeId, ValueRecord>> values_;
    std::map<Multihash, std::map<NodeId, Multiaddr>> providers_;
};

class MemoryRouting final : public Routing {
public:
    MemoryRouting(std::shared_ptr<MemoryRoutingHub> hub, const NodeIdentity& identity, Multiaddr addr);

    const NodeId& self() const override { return identity_.node_id(); }
    std::optional<Multiaddr> find_peer(const NodeId& target) override;
    std::size_t set_value(ByteView key, ByteView value, std::uint64_t sequence) override;
    std::vector<ValueRecord> get_values(ByteView key) override;
    void provide(const Multihash& key) override;
    ProviderResult find_value_peers(const Multihash& key, std::size_t min) override;

    MemoryRoutingHub& hub() { return *hub_; }

private:
    std::shared_ptr<MemoryRoutingHub> hub_;
    NodeIdentity identity_;
    Multiaddr addr_;
};

}  // namespace ipfs::routing
