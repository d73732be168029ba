#include "ipfs/node/node.hpp"

#include <set>

namespace ipfs::node {

Node::Node(netsim::SimNet& net, const identity::NodeIdentity& identity, NodeOptions options,
           std::unique_ptr<blockstore::BlockStore> store)
    : net_(net), identity_(identity), store_(std::move(store))
{
    if (!store_) store_ = std::make_unique<blockstore::MemoryBlockStore>();
    options.dht.difficulty = options.difficulty;
    options.bitswap.difficulty = options.difficulty;
    addr_ = net_.attach(this);
    dht_ = std::make_unique<routing::DhtNode>(net_, addr_, identity_, options.dht);
    bitswap_ = std::make_unique<bitswap::BitSwap>(net_, addr_, identity_, *store_, options.bitswap, options.strategy);
    bitswap_->on_block([this](const Multihash& key, ByteView) {
        if (!fetching_) return;
        std::vector<Multihash> wants;
        expand(key, wants);
        if (!wants.empty()) bitswap_->want(wants);
    });
}

Node::~Node()
{
    if (republish_timer_) net_.cancel(republish_timer_);
    bitswap_.reset();
    dht_.reset();
    if (net_.attached(addr_)) net_.detach(addr_);
}

void Node::deliver(Address from, Bytes frame)
{
    if (frame.empty()) return;
    switch (frame[0]) {
    case routing::DhtNode::kProtocol: dht_->handle_frame(from, frame); break;
    case bitswap::BitSwap::kProtocol: bitswap_->handle_frame(from, frame); break;
    default: break;
    }
}

netsim::FrameInfo Node::describe(ByteView frame)
{
    if (!frame.empty() && frame[0] == routing::DhtNode::kProtocol) return routing::DhtNode::describe(frame);
    if (!frame.empty() && frame[0] == bitswap::BitSwap::kProtocol) return bitswap::BitSwap::describe(frame);
    return {};
}

Multihash Node::add(ByteView data, const files::Chunker& chunker)
{
    auto root = files::add_file(data, chunker, *store_);
    dht_->provide(root);
    return root;
}

// Queues missing children of a stored object, descending through children
// that are already local.
void Node::expand(const Multihash& key, std::vector<Multihash>& wants, bool skip_needed)
{
    std::vector<Multihash> stack{key};
    std::set<Multihash> seen{key};
    while (!stack.empty()) {
        auto k = stack.back();
        stack.pop_back();
        auto bytes = store_->get(k);
        if (!bytes) continue;
        dag::DagObject obj;
        try {
            obj = dag::DagObject::decode(*bytes);
        } catch (const Error&) {
            continue;  // raw blocks and frames have no visible links
        }
        for (const auto& link : obj.links) {
            if (!seen.insert(link.hash).second) continue;
            if (store_->has(link.hash))
                stack.push_back(link.hash);
            else if (!skip_needed || !bitswap_->needs(link.hash))
                wants.push_back(link.hash);
        }
    }
}

void Node::connect_providers(const Multihash& key)
{
    auto found = dht_->find_value_peers(key, 1);
    std::size_t others = 0;
    for (const auto& p : found.providers) {
        if (p.id == id()) continue;
        auto addr = p.addr.sim_node();
        if (!addr) continue;
        ++others;
        bitswap_->connect(p.id, static_cast<Address>(*addr));
    }
    bitswap_->note_providers(key, others);
}

void Node::start_fetch(const Multihash& root)
{
    fetching_ = true;
    std::vector<Multihash> wants;
    if (store_->has(root))
        expand(root, wants);
    else
        wants.push_back(root);
    if (wants.empty()) return;
    connect_providers(root);
    bitswap_->want(wants);
}

bool Node::has_dag(const Multihash& root) const
{
    if (!store_->has(root)) return false;
    std::vector<Multihash> missing;
    const_cast<Node*>(this)->expand(root, missing, false);
    return missing.empty();
}

bool Node::fetch_dag(const Multihash& root, SimTime limit)
{
    auto deadline = net_.now() + limit;
    start_fetch(root);
    net_.run_until([this] { return bitswap_->need_list().empty(); }, deadline);
    fetching_ = false;
    return has_dag(root);
}

bool Node::fetch_block(const Multihash& key, SimTime limit)
{
    if (store_->has(key)) return true;
    auto deadline = net_.now() + limit;
    connect_providers(key);
    bitswap_->want({key});
    net_.run_until([this, &key] { return store_->has(key); }, deadline);
    if (!store_->has(key)) {
        bitswap_->cancel(key);
        return false;
    }
    return true;
}

dag::DagReader Node::network_reader(SimTime per_block_limit)
{
    return dag::DagReader([this, per_block_limit](const Multihash& key) -> std::optional<Bytes> {
        if (auto b = store_->get(key)) return b;
        if (!fetch_block(key, per_block_limit)) return std::nullopt;
        return store_->get(key);
    });
}

Bytes Node::cat(const Multihash& key)
{
    fetch_dag(key);
    return files::cat(key, network_reader());
}

ipns::NameRecord Node::publish_name(const Multihash& value, SimTime validity)
{
    auto record = ipns::publish_name(identity_, value, *dht_, net_.now(), validity);
    published_ = record;
    validity_ = validity;
    schedule_republish(validity / 2);
    return record;
}

void Node::schedule_republish(SimTime delay)
{
    if (republish_timer_) net_.cancel(republish_timer_);
    republish_timer_ = net_.schedule(
        delay,
        [this] {
            republish_timer_ = 0;
            if (!published_) return;
            // Same value, next sequence, fresh expiry.
            auto record = ipns::NameRecord::make(identity_, published_->value, published_->sequence + 1,
                                                 net_.now() + validity_);
            published_ = record;
            dht_->store_record_async(
                routing::ValueRecord::make(identity_, ipns::name_key(id()), record.encode(), record.sequence),
                [](std::size_t) {});
            schedule_republish(validity_ / 2);
        },
        true);
}

ipns::Resolver Node::resolver(const dag::DagReader& reader, const ipns::DnsResolver* dns)
{
    ipns::Resolver r;
    r.routing = dht_.get();
    r.reader = &reader;
    r.dns = dns;
    r.now = net_.now();
    return r;
}

// --- swarm ---

Swarm::Swarm(std::uint64_t seed) : net_(seed), rng_(seed ^ 0x5eedf00dULL)
{
    net_.set_classifier(&Node::describe);
}

Node& Swarm::spawn(const NodeOptions& options, std::size_t bootstrap_count)
{
    auto identity = identity::NodeIdentity::generate(options.difficulty, rng_);
    nodes_.push_back(std::make_unique<Node>(net_, identity, options));
    auto& node = *nodes_.back();
    bootstrap(node, bootstrap_count);
    return node;
}

void Swarm::spawn_all(const SwarmOptions& options)
{
    for (std::size_t i = 0; i < options.nodes; ++i) spawn(options.node, options.bootstrap);
}

void Swarm::bootstrap(Node& node, std::size_t count)
{
    std::vector<Address> peers;
    std::vector<Address> others;
    for (const auto& n : nodes_)
        if (n.get() != &node) others.push_back(n->address());
    for (std::size_t i = 0; i < count && !others.empty(); ++i) peers.push_back(others[rng_.uniform(others.size())]);
    if (!peers.empty()) node.dht().bootstrap(peers);
}

std::vector<Address> Swarm::addresses() const
{
    std::vector<Address> out;
    for (const auto& n : nodes_) out.push_back(n->address());
    return out;
}

std::unique_ptr<Swarm> Swarm::from_scenario(const netsim::ScenarioConfig& cfg, NodeOptions node)
{
    auto swarm = std::make_unique<Swarm>(cfg.seed);
    node.difficulty = cfg.difficulty;
    netsim::ScenarioConfig links = cfg;
    links.drops.clear();
    links.apply_links(swarm->net_, {});
    swarm->spawn_all(SwarmOptions{cfg.nodes, cfg.bootstrap, node});
    cfg.apply_links(swarm->net_, swarm->addresses());
    if (cfg.adversary) swarm->net_.assign_adversaries(*cfg.adversary);
    return swarm;
}

}  // namespace ipfs::node
