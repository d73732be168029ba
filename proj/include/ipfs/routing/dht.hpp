#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "ipfs/netsim/simnet.hpp"
#include "ipfs/routing/routing.hpp"

namespace ipfs::routing {

using netsim::Address;

// 256-bit position in the XOR keyspace: the digest bytes of a multihash,
// zero-padded or truncated. Keys that are not multihashes are hashed first.
using Point = std::array<std::uint8_t, 32>;

Point point_of(const Multihash& mh);
Point point_of_key(ByteView key);
int common_prefix_bits(const Point& a, const Point& b);
// True if a is strictly closer to target than b.
bool closer(const Point& a, const Point& b, const Point& target);
Point xor_distance(const Point& a, const Point& b);

struct Contact {
    NodeId id;
    Point point{};
    Address addr = 0;
    SimTime last_seen{0};
};

// Kademlia table: bucket i holds peers sharing exactly i leading bits with
// the owner, least recently seen first.
class RoutingTable {
public:
    static constexpr int kBuckets = 256;

    RoutingTable(const NodeId& owner, std::size_t k);

    enum class Update { inserted, refreshed, bucket_full, self };
    Update observe(const NodeId& id, Address addr, SimTime now);
    // Head of the bucket id would go into.
    std::optional<Contact> least_recent(const NodeId& id) const;
    bool remove(const NodeId& id);

    std::optional<Contact> find(const NodeId& id) const;
    std::vector<Contact> closest(const Point& target, std::size_t n) const;
    std::vector<Contact> all() const;
    std::size_t size() const;
    int bucket_index(const NodeId& id) const;
    const std::vector<Contact>& bucket(int i) const { return buckets_.at(static_cast<std::size_t>(i)); }
    const Point& owner_point() const { return owner_; }

    // Checks the prefix rule, ordering and uniqueness for every bucket.
    bool audit() const;

private:
    Point owner_;
    std::size_t k_;
    std::vector<std::vector<Contact>> buckets_;
};

struct DhtConfig {
    std::size_t k = 20;
    std::size_t alpha = 3;
    SimTime rpc_timeout = std::chrono::seconds(2);
    SimTime provider_ttl = std::chrono::hours(24);
    SimTime republish = std::chrono::hours(12);
    std::size_t provider_cap = 16;        // records per key per storing node
    std::size_t provider_replicas = 8;    // storing nodes sought per announcement
    std::size_t value_publishers_cap = 16;
    int difficulty = 0;                   // puzzle bits required of every sender
    SimTime sync_limit = std::chrono::minutes(30);
};

struct LookupStats {
    std::size_t contacted = 0;             // distinct nodes sent a query
    std::vector<std::set<NodeId>> paths;   // contacted set per path
};

// One node's Kademlia DHT over the simulated network. Provider records
// follow the Coral rule: a storing node holds at most provider_cap records per
// key and answers "full" beyond that, so announcements spill outward.
class DhtNode final : public Routing {
public:
    static constexpr std::uint8_t kProtocol = 0x01;

    DhtNode(netsim::SimNet& net, Address addr, const NodeIdentity& identity, DhtConfig config = {});
    ~DhtNode() override;
    DhtNode(const DhtNode&) = delete;
    DhtNode& operator=(const DhtNode&) = delete;

    // Entry point for frames whose first byte is kProtocol.
    void handle_frame(Address from, ByteView frame);
    static netsim::FrameInfo describe(ByteView frame);

    const NodeId& self() const override { return identity_.node_id(); }
    Address address() const { return addr_; }
    const RoutingTable& table() const { return table_; }
    const DhtConfig& config() const { return config_; }

    // Asynchronous API, usable from event handlers.
    using PeerCallback = std::function<void(std::optional<Multiaddr>, const LookupStats&)>;
    using ContactsCallback = std::function<void(std::vector<Contact>, const LookupStats&)>;
    using ProvidersCallback = std::function<void(ProviderResult)>;
    using ValuesCallback = std::function<void(std::vector<ValueRecord>)>;
    using CountCallback = std::function<void(std::size_t)>;

    // Pings the given addresses, then looks itself up to fill its table.
    void bootstrap_async(const std::vector<Address>& peers, std::function<void()> done);
    void find_peer_async(const NodeId& target, std::size_t paths, PeerCallback cb);
    void closest_nodes_async(const Point& target, ContactsCallback cb);
    void find_providers_async(const Multihash& key, std::size_t min, ProvidersCallback cb);
    void get_values_async(ByteView key, ValuesCallback cb);
    void provide_async(const Multihash& key, CountCallback cb);
    void store_record_async(const ValueRecord& record, CountCallback cb);

    // Blocking API (drives the simulator).
    void bootstrap(const std::vector<Address>& peers);
    std::optional<Multiaddr> find_peer(const NodeId& target) override;
    std::optional<Multiaddr> disjoint_lookup(const NodeId& target, std::size_t d, LookupStats* stats = nullptr);
    std::optional<Multiaddr> find_peer_counted(const NodeId& target, LookupStats& stats);
    std::size_t set_value(ByteView key, ByteView value, std::uint64_t sequence) override;
    std::vector<ValueRecord> get_values(ByteView key) override;
    void provide(const Multihash& key) override;
    ProviderResult find_value_peers(const Multihash& key, std::size_t min) override;
    // Stores an arbitrary (possibly foreign) record at the nodes nearest its
    // key. Lets tests replay or inject records as an adversary would.
    std::size_t store_record(const ValueRecord& record);

    // Inspection.
    std::size_t provider_records(const Multihash& key) const;
    std::size_t stored_values(ByteView key) const;
    std::uint64_t rpcs_sent() const { return rpcs_sent_; }

    // Test hook: sends a raw STORE_VALUE carrying arbitrary record bytes.
    void send_raw_store(Address to, ByteView record_bytes);

private:
    struct Lookup;
    struct Rpc {
        std::function<void(std::optional<Bytes>)> on_reply;  // body after header, or timeout
        netsim::TimerId timer = 0;
        NodeId peer;
        Address addr = 0;
    };
    struct ProviderEntry {
        Address addr = 0;
        SimTime expiry{0};
    };

    void send_request(Address to, std::uint8_t tag, ByteView body, std::function<void(std::optional<Bytes>)> cb,
                      const std::optional<NodeId>& peer = std::nullopt);
    void send_frame(Address to, std::uint8_t tag, std::uint64_t rpc_id, ByteView body);
    void handle_request(Address from, const NodeId& sender, std::uint8_t tag, std::uint64_t rpc_id, ByteView body);
    void note_peer(const NodeId& id, Address addr);
    Bytes encode_contacts(const std::vector<Contact>& contacts) const;

    void start_lookup(std::shared_ptr<Lookup> lookup);
    void pump(const std::shared_ptr<Lookup>& lookup);
    void finish(const std::shared_ptr<Lookup>& lookup);

    bool accept_record(const ValueRecord& record);
    std::vector<PeerInfo> live_providers(const Multihash& key) const;
    void schedule_republish();

    template <class F>
    void wait_for(F&& done) const;

    netsim::SimNet& net_;
    Address addr_;
    NodeIdentity identity_;
    DhtConfig config_;
    RoutingTable table_;

    std::uint64_t next_rpc_ = 1;
    std::map<std::uint64_t, Rpc> rpcs_;
    std::set<int> evicting_;  // buckets with a liveness ping outstanding

    std::map<Multihash, std::map<NodeId, ProviderEntry>> providers_;
    std::map<Bytes, std::map<NodeId, ValueRecord>> values_;
    std::set<Multihash> provided_;
    netsim::TimerId republish_timer_ = 0;
    std::uint64_t rpcs_sent_ = 0;
    std::shared_ptr<bool> alive_;
};

}  // namespace ipfs::routing
