#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ipfs/bitswap/bitswap.hpp"
#include "ipfs/blockstore/blockstore.hpp"
#include "ipfs/files/files.hpp"
#include "ipfs/ipns/ipns.hpp"
#include "ipfs/merkledag/dag.hpp"
#include "ipfs/netsim/scenario.hpp"
#include "ipfs/netsim/simnet.hpp"
#include "ipfs/routing/dht.hpp"

namespace ipfs::node {

using multiformats::Multihash;
using netsim::Address;

struct NodeOptions {
    int difficulty = 0;
    routing::DhtConfig dht;
    bitswap::BitSwapConfig bitswap;
    std::shared_ptr<const bitswap::Strategy> strategy = std::make_shared<bitswap::SigmoidStrategy>();
};

// One simulated peer: a block store, a DHT node and a BitSwap engine
// sharing an address. Frames are routed by their protocol byte.
class Node : public netsim::Endpoint {
public:
    Node(netsim::SimNet& net, const identity::NodeIdentity& identity, NodeOptions options = {},
         std::unique_ptr<blockstore::BlockStore> store = nullptr);
    ~Node() override;
    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    void deliver(Address from, Bytes frame) override;
    // Frame description for both protocols; install with SimNet::set_classifier.
    static netsim::FrameInfo describe(ByteView frame);

    const identity::NodeIdentity& identity() const { return identity_; }
    const identity::NodeId& id() const { return identity_.node_id(); }
    Address address() const { return addr_; }
    netsim::SimNet& net() { return net_; }
    blockstore::BlockStore& store() { return *store_; }
    routing::DhtNode& dht() { return *dht_; }
    bitswap::BitSwap& bitswap() { return *bitswap_; }

    // Stores the file and announces its root.
    Multihash add(ByteView data, const files::Chunker& chunker);
    // Announces an object already in the store.
    void provide(const Multihash& key) { dht_->provide(key); }

    // Locates providers of root and pulls the whole graph into the local
    // store. Blocking: drives the simulator, so never call it from inside a
    // network event. False if the graph is incomplete when the limit passes.
    bool fetch_dag(const Multihash& root, SimTime limit = std::chrono::minutes(10));
    bool fetch_block(const Multihash& key, SimTime limit = std::chrono::minutes(10));
    // Non-blocking part of fetch_dag: find providers, connect and start
    // wanting. Blocks arriving afterwards pull in their children.
    void start_fetch(const Multihash& root);
    // Every block reachable from root is in the local store.
    bool has_dag(const Multihash& root) const;

    // Reader that falls back to fetch_block for missing blocks.
    dag::DagReader network_reader(SimTime per_block_limit = std::chrono::minutes(1));
    dag::DagReader local_reader() const { return dag::DagReader(dag::store_getter(*store_)); }

    // Fetches the graph and concatenates the file.
    Bytes cat(const Multihash& key);

    // Publishes value under this node's name and keeps the record alive by
    // republishing at half its validity.
    ipns::NameRecord publish_name(const Multihash& value, SimTime validity = ipns::kDefaultValidity);
    // Resolver bound to this node's routing and network reader. The reader
    // must outlive the resolver.
    ipns::Resolver resolver(const dag::DagReader& reader, const ipns::DnsResolver* dns = nullptr);

private:
    void expand(const Multihash& key, std::vector<Multihash>& wants, bool skip_needed = true);
    void connect_providers(const Multihash& key);
    void schedule_republish(SimTime delay);

    netsim::SimNet& net_;
    identity::NodeIdentity identity_;
    Address addr_ = 0;
    std::unique_ptr<blockstore::BlockStore> store_;
    std::unique_ptr<routing::DhtNode> dht_;
    std::unique_ptr<bitswap::BitSwap> bitswap_;
    bool fetching_ = false;
    std::optional<ipns::NameRecord> published_;
    SimTime validity_{0};
    netsim::TimerId republish_timer_ = 0;
};

struct SwarmOptions {
    std::size_t nodes = 0;
    std::size_t bootstrap = 4;  // random earlier peers each node contacts
    NodeOptions node;
};

// A simulated network full of nodes, bootstrapped one after another.
class Swarm {
public:
    explicit Swarm(std::uint64_t seed);
    static std::unique_ptr<Swarm> from_scenario(const netsim::ScenarioConfig& cfg, NodeOptions node = {});

    netsim::SimNet& net() { return net_; }
    // Creates a node with a fresh identity and bootstraps it against up to
    // `bootstrap` random existing nodes.
    Node& spawn(const NodeOptions& options, std::size_t bootstrap);
    void spawn_all(const SwarmOptions& options);
    // Connects an already built endpoint into the DHT.
    void bootstrap(Node& node, std::size_t count);

    std::size_t size() const { return nodes_.size(); }
    Node& node(std::size_t i) { return *nodes_.at(i); }
    std::vector<Address> addresses() const;
    Rng& rng() { return rng_; }

private:
    netsim::SimNet net_;
    Rng rng_;
    std::vector<std::unique_ptr<Node>> nodes_;
};

}  // namespace ipfs::node
