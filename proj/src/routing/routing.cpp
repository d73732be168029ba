#include "ipfs/routing/routing.hpp"

#include "ipfs/common/wire.hpp"

namespace ipfs::routing {

namespace {
constexpr std::uint8_t kRecordDomain[] = {'i', 'p', 'f', 's', '-', 'v', 'a', 'l', 'u', 'e', 0};
}

ValueRecord ValueRecord::make(const NodeIdentity& publisher, ByteView key, ByteView value, std::uint64_t sequence)
{
    if (value.size() > kMaxValueBytes)
        throw ValueTooLarge("value of " + std::to_string(value.size()) + " bytes exceeds " +
                            std::to_string(kMaxValueBytes));
    if (key.empty() || key.size() > kMaxKeyBytes) throw RoutingError("routing key must be 1.." +
                                                                     std::to_string(kMaxKeyBytes) + " bytes");
    ValueRecord r;
    r.key.assign(key.begin(), key.end());
    r.value.assign(value.begin(), value.end());
    r.publisher_key = publisher.public_key();
    r.sequence = sequence;
    r.signature = publisher.sign_raw(r.signing_payload());
    return r;
}

Bytes ValueRecord::signing_payload() const
{
    Writer w;
    w.raw(ByteView(kRecordDomain, sizeof kRecordDomain)).length_prefixed(key).length_prefixed(value).uvarint(sequence);
    return std::move(w).bytes();
}

bool ValueRecord::verify() const
{
    if (value.size() > kMaxValueBytes || key.empty() || key.size() > kMaxKeyBytes) return false;
    try {
        return identity::verify_raw(publisher_key, signing_payload(), signature);
    } catch (const Error&) {
        return false;
    }
}

Bytes ValueRecord::encode() const
{
    Writer w;
    w.length_prefixed(key).length_prefixed(value).length_prefixed(publisher_key).uvarint(sequence).length_prefixed(
        signature);
    return std::move(w).bytes();
}

ValueRecord ValueRecord::decode(ByteView raw)
{
    Reader r(raw);
    ValueRecord rec;
    auto key = r.length_prefixed();
    rec.key.assign(key.begin(), key.end());
    auto value = r.length_prefixed();
    rec.value.assign(value.begin(), value.end());
    auto pk = r.length_prefixed();
    rec.publisher_key.assign(pk.begin(), pk.end());
    rec.sequence = r.uvarint();
    auto sig = r.length_prefixed();
    rec.signature.assign(sig.begin(), sig.end());
    r.expect_done("value record");
    return rec;
}

bool supersedes(const ValueRecord& a, const ValueRecord& b)
{
    if (a.sequence != b.sequence) return a.sequence > b.sequence;
    return multiformats::digest(multiformats::kDefaultHash, a.value) >
           multiformats::digest(multiformats::kDefaultHash, b.value);
}

std::optional<ValueRecord> best_record(const std::vector<ValueRecord>& records)
{
    std::optional<ValueRecord> best;
    for (const auto& r : records)
        if (r.verify() && (!best || supersedes(r, *best))) best = r;
    return best;
}

// --- MemoryRoutingHub ---

std::optional<Multiaddr> MemoryRoutingHub::peer(const NodeId& id) const
{
    auto it = peers_.find(id);
    if (it == peers_.end()) return std::nullopt;
    return it->second;
}

bool MemoryRoutingHub::store(const ValueRecord& record)
{
    if (!record.verify()) return false;
    auto& slot = values_[record.key];
    auto publisher = record.publisher();
    auto it = slot.find(publisher);
    if (it != slot.end() && !supersedes(record, it->second)) return false;
    slot[publisher] = record;
    return true;
}

std::vector<ValueRecord> MemoryRoutingHub::values(ByteView key) const
{
    std::vector<ValueRecord> out;
    auto it = values_.find(Bytes(key.begin(), key.end()));
    if (it != values_.end())
        for (const auto& [_, r] : it->second) out.push_back(r);
    return out;
}

void MemoryRoutingHub::add_provider(const Multihash& key, const PeerInfo& provider)
{
    providers_[key][provider.id] = provider.addr;
}

std::vector<PeerInfo> MemoryRoutingHub::providers(const Multihash& key) const
{
    std::vector<PeerInfo> out;
    auto it = providers_.find(key);
    if (it != providers_.end())
        for (const auto& [id, addr] : it->second) out.push_back({id, addr});
    return out;
}

Bytes MemoryRoutingHub::encode() const
{
    Writer w;
    w.byte(1);
    w.uvarint(peers_.size());
    for (const auto& [id, addr] : peers_) w.length_prefixed(id.encode()).length_prefixed(addr.encode());
    std::size_t count = 0;
    for (const auto& [_, slot] : values_) count += slot.size();
    w.uvarint(count);
    for (const auto& [_, slot] : values_)
        for (const auto& [__, r] : slot) w.length_prefixed(r.encode());
    w.uvarint(providers_.size());
    for (const auto& [key, provs] : providers_) {
        w.length_prefixed(key.encode()).uvarint(provs.size());
        for (const auto& [id, addr] : provs) w.length_prefixed(id.encode()).length_prefixed(addr.encode());
    }
    return std::move(w).bytes();
}

MemoryRoutingHub MemoryRoutingHub::decode(ByteView raw)
{
    MemoryRoutingHub hub;
    Reader r(raw);
    if (r.byte() != 1) r.fail("unsupported routing table version");
    for (auto n = r.uvarint(); n > 0; --n) {
        auto id = Multihash::decode(r.length_prefixed());
        hub.peers_[id] = Multiaddr::decode(r.length_prefixed());
    }
    for (auto n = r.uvarint(); n > 0; --n) hub.store(ValueRecord::decode(r.length_prefixed()));
    for (auto n = r.uvarint(); n > 0; --n) {
        auto key = Multihash::decode(r.length_prefixed());
        for (auto m = r.uvarint(); m > 0; --m) {
            auto id = Multihash::decode(r.length_prefixed());
            hub.providers_[key][id] = Multiaddr::decode(r.length_prefixed());
        }
    }
    r.expect_done("routing table");
    return hub;
}

// --- MemoryRouting ---

MemoryRouting::MemoryRouting(std::shared_ptr<MemoryRoutingHub> hub, const NodeIdentity& identity, Multiaddr addr)
    : hub_(std::move(hub)), identity_(identity), addr_(std::move(addr))
{
    hub_->add_peer({identity_.node_id(), addr_});
}

std::optional<Multiaddr> MemoryRouting::find_peer(const NodeId& target)
{
    if (target == self()) return addr_;
    return hub_->peer(target);
}

std::size_t MemoryRouting::set_value(ByteView key, ByteView value, std::uint64_t sequence)
{
    auto record = ValueRecord::make(identity_, key, value, sequence);
    return hub_->store(record) ? 1 : 0;
}

std::vector<ValueRecord> MemoryRouting::get_values(ByteView key) { return hub_->values(key); }

void MemoryRouting::provide(const Multihash& key) { hub_->add_provider(key, {self(), addr_}); }

ProviderResult MemoryRouting::find_value_peers(const Multihash& key, std::size_t min)
{
    ProviderResult result;
    result.providers = hub_->providers(key);
    result.shortfall = result.providers.size() < min;
    return result;
}

}  // namespace ipfs::routing
