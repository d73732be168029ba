#include "ipfs/routing/dht.hpp"

#include <algorithm>

#include "ipfs/common/wire.hpp"

namespace ipfs::routing {

namespace {

enum Tag : std::uint8_t {
    kPing = 0x01,
    kFindNode = 0x02,
    kFindValue = 0x03,
    kStoreValue = 0x04,
    kAddProvider = 0x05,
    kGetProviders = 0x06,
    kResponse = 0x80,
};

constexpr std::uint8_t kProviderStored = 0;
constexpr std::uint8_t kProviderFull = 1;

std::string tag_name(std::uint8_t tag)
{
    std::string base;
    switch (tag & 0x7f) {
    case kPing: base = "ping"; break;
    case kFindNode: base = "find_node"; break;
    case kFindValue: base = "find_value"; break;
    case kStoreValue: base = "store_value"; break;
    case kAddProvider: base = "add_provider"; break;
    case kGetProviders: base = "get_providers"; break;
    default: base = "unknown"; break;
    }
    return "dht." + base + ((tag & kResponse) ? ".reply" : "");
}

}  // namespace

struct DhtNode::Lookup {
    enum class Kind { nodes, value, providers };
    enum class State { fresh, inflight, ok, failed, skipped };
    struct Candidate {
        Contact contact;
        State state = State::fresh;
    };
    struct Path {
        std::map<Point, Candidate> candidates;  // keyed by XOR distance to target
        std::size_t inflight = 0;
        bool done = false;
        std::set<NodeId> contacted;
    };

    Kind kind = Kind::nodes;
    Point target{};
    std::optional<NodeId> want_peer;
    Bytes key;          // value lookups
    Multihash key_mh;   // provider lookups
    std::size_t min_providers = 0;

    std::vector<Path> paths;
    std::set<NodeId> claimed;
    bool finished = false;

    std::optional<Multiaddr> found;
    std::vector<ValueRecord> records;
    std::map<NodeId, PeerInfo> providers;
    std::function<void(Lookup&)> on_done;

    LookupStats stats() const
    {
        LookupStats s;
        for (const auto& p : paths) {
            s.contacted += p.contacted.size();
            s.paths.push_back(p.contacted);
        }
        return s;
    }
};

DhtNode::DhtNode(netsim::SimNet& net, Address addr, const NodeIdentity& identity, DhtConfig config)
    : net_(net), addr_(addr), identity_(identity), config_(config), table_(identity.node_id(), config.k),
      alive_(std::make_shared<bool>(true))
{
}

DhtNode::~DhtNode()
{
    *alive_ = false;
    for (auto& [_, rpc] : rpcs_) net_.cancel(rpc.timer);
    if (republish_timer_) net_.cancel(republish_timer_);
}

netsim::FrameInfo DhtNode::describe(ByteView frame)
{
    netsim::FrameInfo info;
    if (frame.size() < 2 || frame[0] != kProtocol) return info;
    info.type = tag_name(frame[1]);
    info.query = (frame[1] & kResponse) == 0;
    return info;
}

template <class F>
void DhtNode::wait_for(F&& done) const
{
    net_.run_until(std::forward<F>(done), net_.now() + config_.sync_limit);
}

// --- framing ---

void DhtNode::send_frame(Address to, std::uint8_t tag, std::uint64_t rpc_id, ByteView body)
{
    Writer w;
    w.byte(kProtocol).byte(tag).uvarint(rpc_id).length_prefixed(self().encode()).length_prefixed(
        identity_.public_key());
    w.raw(body);
    net_.send(addr_, to, std::move(w).bytes());
}

void DhtNode::send_request(Address to, std::uint8_t tag, ByteView body, std::function<void(std::optional<Bytes>)> cb,
                           const std::optional<NodeId>& peer)
{
    auto id = next_rpc_++;
    ++rpcs_sent_;
    Rpc rpc;
    rpc.on_reply = std::move(cb);
    rpc.addr = to;
    if (peer) rpc.peer = *peer;
    rpc.timer = net_.schedule(config_.rpc_timeout, [this, id] {
        auto it = rpcs_.find(id);
        if (it == rpcs_.end()) return;
        auto rpc = std::move(it->second);
        rpcs_.erase(it);
        if (!rpc.peer.empty()) table_.remove(rpc.peer);
        rpc.on_reply(std::nullopt);
    });
    rpcs_.emplace(id, std::move(rpc));
    send_frame(to, tag, id, body);
}

void DhtNode::handle_frame(Address from, ByteView frame)
{
    std::uint8_t tag = 0;
    std::uint64_t rpc_id = 0;
    NodeId sender;
    Bytes body;
    try {
        Reader r(frame);
        if (r.byte() != kProtocol) return;
        tag = r.byte();
        rpc_id = r.uvarint();
        sender = Multihash::decode(r.length_prefixed());
        auto pk = r.length_prefixed();
        if (!identity::verify_peer(sender, pk, config_.difficulty)) return;
        auto rest = r.rest();
        body.assign(rest.begin(), rest.end());
    } catch (const Error&) {
        return;  // malformed frames are dropped without a reply
    } catch (const std::exception&) {
        return;
    }
    if (sender == self()) return;
    note_peer(sender, from);

    if (tag & kResponse) {
        auto it = rpcs_.find(rpc_id);
        if (it == rpcs_.end() || it->second.addr != from) return;
        if (!it->second.peer.empty() && it->second.peer != sender) return;
        auto rpc = std::move(it->second);
        rpcs_.erase(it);
        net_.cancel(rpc.timer);
        rpc.on_reply(std::move(body));
        return;
    }
    try {
        handle_request(from, sender, tag, rpc_id, body);
    } catch (const Error&) {
        // A malformed request gets no answer; the requester times out.
    }
}

void DhtNode::note_peer(const NodeId& id, Address addr)
{
    auto update = table_.observe(id, addr, net_.now());
    if (update != RoutingTable::Update::bucket_full) return;
    int bucket = table_.bucket_index(id);
    if (evicting_.count(bucket)) return;
    auto head = table_.least_recent(id);
    if (!head) return;
    evicting_.insert(bucket);
    // Ping the least recently seen entry; only if it stays silent does the
    // newcomer take its place.
    send_request(
        head->addr, kPing, {},
        [this, bucket, id, addr](std::optional<Bytes> reply) {
            evicting_.erase(bucket);
            if (!reply) table_.observe(id, addr, net_.now());
        },
        head->id);
}

Bytes DhtNode::encode_contacts(const std::vector<Contact>& contacts) const
{
    Writer w;
    w.uvarint(contacts.size());
    for (const auto& c : contacts) w.length_prefixed(c.id.encode()).uvarint(c.addr);
    return std::move(w).bytes();
}

namespace {

std::vector<Contact> read_contacts(Reader& r)
{
    std::vector<Contact> out;
    auto n = r.uvarint();
    if (n > 1024) r.fail("too many contacts");
    for (std::uint64_t i = 0; i < n; ++i) {
        Contact c;
        c.id = Multihash::decode(r.length_prefixed());
        c.point = point_of(c.id);
        auto addr = r.uvarint();
        if (addr > 0xffffffffULL) r.fail("address out of range");
        c.addr = static_cast<Address>(addr);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

void DhtNode::handle_request(Address from, const NodeId& sender, std::uint8_t tag, std::uint64_t rpc_id, ByteView body)
{
    Reader r(body);
    Writer reply;
    switch (tag) {
    case kPing:
        r.expect_done("ping");
        break;
    case kFindNode: {
        auto target = r.take(32);
        r.expect_done("find_node");
        Point p{};
        std::copy(target.begin(), target.end(), p.begin());
        reply.raw(encode_contacts(table_.closest(p, config_.k)));
        break;
    }
    case kFindValue: {
        auto key = r.length_prefixed();
        r.expect_done("find_value");
        Bytes k(key.begin(), key.end());
        auto it = values_.find(k);
        std::size_t n = it == values_.end() ? 0 : it->second.size();
        reply.uvarint(n);
        if (it != values_.end())
            for (const auto& [_, rec] : it->second) reply.length_prefixed(rec.encode());
        reply.raw(encode_contacts(table_.closest(point_of_key(key), config_.k)));
        break;
    }
    case kStoreValue: {
        auto raw = r.length_prefixed();
        r.expect_done("store_value");
        bool ok = false;
        try {
            ok = accept_record(ValueRecord::decode(raw));
        } catch (const Error&) {
            ok = false;
        }
        reply.byte(ok ? 1 : 0);
        break;
    }
    case kAddProvider: {
        auto key = Multihash::decode(r.length_prefixed());
        r.expect_done("add_provider");
        auto& slot = providers_[key];
        for (auto it = slot.begin(); it != slot.end();)
            it = it->second.expiry <= net_.now() ? slot.erase(it) : std::next(it);
        std::uint8_t status = kProviderStored;
        if (slot.count(sender) || slot.size() < config_.provider_cap)
            slot[sender] = ProviderEntry{from, net_.now() + config_.provider_ttl};
        else
            status = kProviderFull;
        reply.byte(status);
        break;
    }
    case kGetProviders: {
        auto key = Multihash::decode(r.length_prefixed());
        r.expect_done("get_providers");
        auto live = live_providers(key);
        reply.uvarint(live.size());
        for (const auto& p : live) reply.length_prefixed(p.id.encode()).uvarint(*p.addr.sim_node());
        reply.raw(encode_contacts(table_.closest(point_of(key), config_.k)));
        break;
    }
    default:
        return;
    }
    send_frame(from, static_cast<std::uint8_t>(tag | kResponse), rpc_id, reply.bytes());
}

bool DhtNode::accept_record(const ValueRecord& record)
{
    if (!record.verify()) return false;
    auto& slot = values_[record.key];
    auto publisher = record.publisher();
    auto it = slot.find(publisher);
    if (it == slot.end()) {
        if (slot.size() >= config_.value_publishers_cap) return false;
        slot.emplace(publisher, record);
        return true;
    }
    if (!supersedes(record, it->second)) return false;
    it->second = record;
    return true;
}

std::vector<PeerInfo> DhtNode::live_providers(const Multihash& key) const
{
    std::vector<PeerInfo> out;
    auto it = providers_.find(key);
    if (it == providers_.end()) return out;
    for (const auto& [id, entry] : it->second)
        if (entry.expiry > net_.now()) out.push_back({id, Multiaddr::sim(entry.addr)});
    return out;
}

// --- iterative lookup ---

void DhtNode::start_lookup(std::shared_ptr<Lookup> lookup)
{
    auto seeds = table_.closest(lookup->target, config_.k);
    std::size_t d = std::max<std::size_t>(1, std::min(lookup->paths.size(), seeds.size()));
    lookup->paths.resize(d);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        auto& path = lookup->paths[i % d];
        path.candidates.emplace(xor_distance(seeds[i].point, lookup->target), Lookup::Candidate{seeds[i]});
    }
    if (seeds.empty())
        finish(lookup);
    else
        pump(lookup);
}

void DhtNode::pump(const std::shared_ptr<Lookup>& lookup)
{
    if (lookup->finished) return;
    for (std::size_t pi = 0; pi < lookup->paths.size(); ++pi) {
        auto& path = lookup->paths[pi];
        if (path.done) continue;
        while (path.inflight < config_.alpha) {
            Lookup::Candidate* next = nullptr;
            std::size_t live = 0;
            for (auto& [dist, cand] : path.candidates) {
                if (cand.state == Lookup::State::failed || cand.state == Lookup::State::skipped) continue;
                if (live++ >= config_.k) break;
                if (cand.state != Lookup::State::fresh) continue;
                // Disjoint paths: the first path to claim a node owns it.
                if (!lookup->claimed.insert(cand.contact.id).second) {
                    cand.state = Lookup::State::skipped;
                    --live;
                    continue;
                }
                next = &cand;
                break;
            }
            if (!next) break;
            next->state = Lookup::State::inflight;
            ++path.inflight;
            path.contacted.insert(next->contact.id);

            Writer body;
            std::uint8_t tag = kFindNode;
            switch (lookup->kind) {
            case Lookup::Kind::nodes: body.raw(lookup->target); break;
            case Lookup::Kind::value: tag = kFindValue; body.length_prefixed(lookup->key); break;
            case Lookup::Kind::providers: tag = kGetProviders; body.length_prefixed(lookup->key_mh.encode()); break;
            }
            auto dist = xor_distance(next->contact.point, lookup->target);
            auto contact = next->contact;
            send_request(
                contact.addr, tag, body.bytes(),
                [this, lookup, pi, dist, contact](std::optional<Bytes> reply) {
                    auto& path = lookup->paths[pi];
                    --path.inflight;
                    auto& cand = path.candidates[dist];
                    if (lookup->finished) return;
                    if (!reply) {
                        cand.state = Lookup::State::failed;
                        pump(lookup);
                        return;
                    }
                    cand.state = Lookup::State::ok;
                    std::vector<Contact> contacts;
                    try {
                        Reader r(*reply);
                        if (lookup->kind == Lookup::Kind::value) {
                            for (auto n = r.uvarint(); n > 0; --n) {
                                auto rec = ValueRecord::decode(r.length_prefixed());
                                if (rec.key == lookup->key && rec.verify()) lookup->records.push_back(std::move(rec));
                            }
                        } else if (lookup->kind == Lookup::Kind::providers) {
                            for (auto n = r.uvarint(); n > 0; --n) {
                                auto id = Multihash::decode(r.length_prefixed());
                                auto addr = r.uvarint();
                                lookup->providers.emplace(id, PeerInfo{id, Multiaddr::sim(addr)});
                            }
                        }
                        contacts = read_contacts(r);
                        r.expect_done("lookup reply");
                    } catch (const Error&) {
                        cand.state = Lookup::State::failed;
                        pump(lookup);
                        return;
                    }
                    if (lookup->want_peer && contact.id == *lookup->want_peer) lookup->found = Multiaddr::sim(contact.addr);
                    for (auto& c : contacts) {
                        if (c.id == self()) continue;
                        if (lookup->want_peer && c.id == *lookup->want_peer && !lookup->found)
                            lookup->found = Multiaddr::sim(c.addr);
                        path.candidates.try_emplace(xor_distance(c.point, lookup->target), Lookup::Candidate{c});
                    }
                    if (lookup->found ||
                        (lookup->kind == Lookup::Kind::providers && lookup->min_providers > 0 &&
                         lookup->providers.size() >= lookup->min_providers)) {
                        finish(lookup);
                        return;
                    }
                    pump(lookup);
                },
                contact.id);
        }
        if (path.inflight == 0) path.done = true;
    }
    if (std::all_of(lookup->paths.begin(), lookup->paths.end(), [](const Lookup::Path& p) { return p.done; }))
        finish(lookup);
}

void DhtNode::finish(const std::shared_ptr<Lookup>& lookup)
{
    if (lookup->finished) return;
    lookup->finished = true;
    if (lookup->on_done) lookup->on_done(*lookup);
}

// --- asynchronous operations ---

void DhtNode::bootstrap_async(const std::vector<Address>& peers, std::function<void()> done)
{
    auto remaining = std::make_shared<std::size_t>(peers.size());
    auto after_pings = [this, done = std::move(done)] {
        closest_nodes_async(point_of(self()), [done](std::vector<Contact>, const LookupStats&) {
            if (done) done();
        });
    };
    if (peers.empty()) {
        after_pings();
        return;
    }
    auto shared_after = std::make_shared<std::function<void()>>(std::move(after_pings));
    for (auto addr : peers)
        send_request(addr, kPing, {}, [remaining, shared_after](std::optional<Bytes>) {
            if (--*remaining == 0) (*shared_after)();
        });
}

void DhtNode::find_peer_async(const NodeId& target, std::size_t paths, PeerCallback cb)
{
    if (target == self()) {
        cb(Multiaddr::sim(addr_), LookupStats{});
        return;
    }
    auto lookup = std::make_shared<Lookup>();
    lookup->kind = Lookup::Kind::nodes;
    lookup->target = point_of(target);
    lookup->want_peer = target;
    lookup->paths.resize(std::max<std::size_t>(1, paths));
    lookup->on_done = [cb = std::move(cb)](Lookup& l) { cb(l.found, l.stats()); };
    start_lookup(lookup);
}

void DhtNode::closest_nodes_async(const Point& target, ContactsCallback cb)
{
    auto lookup = std::make_shared<Lookup>();
    lookup->kind = Lookup::Kind::nodes;
    lookup->target = target;
    lookup->paths.resize(1);
    lookup->on_done = [this, cb = std::move(cb)](Lookup& l) {
        std::vector<Contact> out;
        for (const auto& [_, cand] : l.paths[0].candidates) {
            if (cand.state != Lookup::State::ok) continue;
            out.push_back(cand.contact);
            if (out.size() >= config_.k) break;
        }
        cb(std::move(out), l.stats());
    };
    start_lookup(lookup);
}

void DhtNode::find_providers_async(const Multihash& key, std::size_t min, ProvidersCallback cb)
{
    auto lookup = std::make_shared<Lookup>();
    lookup->kind = Lookup::Kind::providers;
    lookup->target = point_of(key);
    lookup->key_mh = key;
    lookup->min_providers = min;
    lookup->paths.resize(1);
    if (provided_.count(key)) lookup->providers.emplace(self(), PeerInfo{self(), Multiaddr::sim(addr_)});
    for (auto& p : live_providers(key)) lookup->providers.emplace(p.id, p);
    lookup->on_done = [min, cb = std::move(cb)](Lookup& l) {
        ProviderResult result;
        for (auto& [_, p] : l.providers) result.providers.push_back(p);
        result.shortfall = result.providers.size() < min;
        cb(std::move(result));
    };
    if (min > 0 && lookup->providers.size() >= min) {
        finish(lookup);
        return;
    }
    start_lookup(lookup);
}

void DhtNode::get_values_async(ByteView key, ValuesCallback cb)
{
    auto lookup = std::make_shared<Lookup>();
    lookup->kind = Lookup::Kind::value;
    lookup->target = point_of_key(key);
    lookup->key.assign(key.begin(), key.end());
    lookup->paths.resize(1);
    lookup->on_done = [this, cb = std::move(cb)](Lookup& l) {
        std::vector<ValueRecord> out;
        if (auto it = values_.find(l.key); it != values_.end())
            for (const auto& [_, rec] : it->second) out.push_back(rec);
        for (auto& rec : l.records)
            if (std::find(out.begin(), out.end(), rec) == out.end()) out.push_back(std::move(rec));
        cb(std::move(out));
    };
    start_lookup(lookup);
}

void DhtNode::provide_async(const Multihash& key, CountCallback cb)
{
    provided_.insert(key);
    schedule_republish();
    closest_nodes_async(point_of(key), [this, key, cb = std::move(cb)](std::vector<Contact> contacts,
                                                                       const LookupStats&) {
        struct Spill {
            std::vector<Contact> contacts;
            std::size_t next = 0;
            std::size_t outstanding = 0;
            std::size_t stored = 0;
            CountCallback cb;
            bool reported = false;
        };
        auto state = std::make_shared<Spill>();
        state->contacts = std::move(contacts);
        state->cb = std::move(cb);
        Bytes body = Writer().length_prefixed(key.encode()).bytes();

        // Announce to the nearest nodes; every "full" answer or timeout moves
        // the announcement one node further out.
        auto launch = std::make_shared<std::function<void()>>();
        std::weak_ptr<std::function<void()>> weak = launch;
        *launch = [this, state, body, weak] {
            auto launch = weak.lock();
            while (state->outstanding + state->stored < config_.provider_replicas &&
                   state->next < state->contacts.size()) {
                const auto& c = state->contacts[state->next++];
                ++state->outstanding;
                send_request(
                    c.addr, kAddProvider, body,
                    [state, launch](std::optional<Bytes> reply) {
                        --state->outstanding;
                        if (reply && reply->size() == 1 && (*reply)[0] == kProviderStored) ++state->stored;
                        (*launch)();
                    },
                    c.id);
            }
            if (state->outstanding == 0 && !state->reported) {
                state->reported = true;
                if (state->cb) state->cb(state->stored);
            }
        };
        (*launch)();
    });
}

void DhtNode::store_record_async(const ValueRecord& record, CountCallback cb)
{
    std::size_t local = accept_record(record) ? 1 : 0;
    closest_nodes_async(point_of_key(record.key), [this, record, local, cb = std::move(cb)](
                                                      std::vector<Contact> contacts, const LookupStats&) {
        auto acks = std::make_shared<std::size_t>(local);
        auto outstanding = std::make_shared<std::size_t>(contacts.size());
        if (contacts.empty()) {
            if (cb) cb(*acks);
            return;
        }
        Bytes body = Writer().length_prefixed(record.encode()).bytes();
        for (const auto& c : contacts)
            send_request(
                c.addr, kStoreValue, body,
                [acks, outstanding, cb](std::optional<Bytes> reply) {
                    if (reply && reply->size() == 1 && (*reply)[0] == 1) ++*acks;
                    if (--*outstanding == 0 && cb) cb(*acks);
                },
                c.id);
    });
}

void DhtNode::schedule_republish()
{
    if (republish_timer_) return;
    republish_timer_ = net_.schedule(
        config_.republish,
        [this] {
            republish_timer_ = 0;
            auto keys = provided_;
            for (const auto& key : keys) provide_async(key, nullptr);
            schedule_republish();
        },
        true);
}

// --- blocking wrappers ---

void DhtNode::bootstrap(const std::vector<Address>& peers)
{
    bool done = false;
    bootstrap_async(peers, [&] { done = true; });
    wait_for([&] { return done; });
}

std::optional<Multiaddr> DhtNode::find_peer(const NodeId& target)
{
    LookupStats stats;
    return find_peer_counted(target, stats);
}

std::optional<Multiaddr> DhtNode::find_peer_counted(const NodeId& target, LookupStats& stats)
{
    return disjoint_lookup(target, 1, &stats);
}

std::optional<Multiaddr> DhtNode::disjoint_lookup(const NodeId& target, std::size_t d, LookupStats* stats)
{
    bool done = false;
    std::optional<Multiaddr> result;
    find_peer_async(target, d, [&](std::optional<Multiaddr> addr, const LookupStats& s) {
        result = std::move(addr);
        if (stats) *stats = s;
        done = true;
    });
    wait_for([&] { return done; });
    return result;
}

std::size_t DhtNode::set_value(ByteView key, ByteView value, std::uint64_t sequence)
{
    return store_record(ValueRecord::make(identity_, key, value, sequence));
}

std::size_t DhtNode::store_record(const ValueRecord& record)
{
    bool done = false;
    std::size_t count = 0;
    store_record_async(record, [&](std::size_t n) {
        count = n;
        done = true;
    });
    wait_for([&] { return done; });
    return count;
}

std::vector<ValueRecord> DhtNode::get_values(ByteView key)
{
    bool done = false;
    std::vector<ValueRecord> out;
    get_values_async(key, [&](std::vector<ValueRecord> records) {
        out = std::move(records);
        done = true;
    });
    wait_for([&] { return done; });
    return out;
}

void DhtNode::provide(const Multihash& key)
{
    bool done = false;
    provide_async(key, [&](std::size_t) { done = true; });
    wait_for([&] { return done; });
}

ProviderResult DhtNode::find_value_peers(const Multihash& key, std::size_t min)
{
    bool done = false;
    ProviderResult out;
    find_providers_async(key, min, [&](ProviderResult r) {
        out = std::move(r);
        done = true;
    });
    wait_for([&] { return done; });
    if (!done) out.shortfall = true;
    return out;
}

std::size_t DhtNode::provider_records(const Multihash& key) const
{
    auto it = providers_.find(key);
    if (it == providers_.end()) return 0;
    return static_cast<std::size_t>(std::count_if(it->second.begin(), it->second.end(),
                                                  [&](const auto& kv) { return kv.second.expiry > net_.now(); }));
}

std::size_t DhtNode::stored_values(ByteView key) const
{
    auto it = values_.find(Bytes(key.begin(), key.end()));
    return it == values_.end() ? 0 : it->second.size();
}

void DhtNode::send_raw_store(Address to, ByteView record_bytes)
{
    send_request(to, kStoreValue, Writer().length_prefixed(record_bytes).bytes(), [](std::optional<Bytes>) {});
}

}  // namespace ipfs::routing
