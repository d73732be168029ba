#include <algorithm>
#include <bit>

#include "ipfs/routing/dht.hpp"

namespace ipfs::routing {

Point point_of(const Multihash& mh)
{
    Point p{};
    const auto& d = mh.digest();
    std::copy_n(d.begin(), std::min(d.size(), p.size()), p.begin());
    return p;
}

Point point_of_key(ByteView key)
{
    try {
        return point_of(Multihash::decode(key));
    } catch (const Error&) {
        return point_of(Multihash::of(key));
    }
}

int common_prefix_bits(const Point& a, const Point& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::uint8_t x = a[i] ^ b[i];
        if (x != 0) return static_cast<int>(i * 8) + std::countl_zero(x);
    }
    return static_cast<int>(a.size() * 8);
}

Point xor_distance(const Point& a, const Point& b)
{
    Point d{};
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] ^ b[i];
    return d;
}

bool closer(const Point& a, const Point& b, const Point& target)
{
    return xor_distance(a, target) < xor_distance(b, target);
}

RoutingTable::RoutingTable(const NodeId& owner, std::size_t k)
    : owner_(point_of(owner)), k_(k), buckets_(kBuckets)
{
}

int RoutingTable::bucket_index(const NodeId& id) const { return common_prefix_bits(owner_, point_of(id)); }

RoutingTable::Update RoutingTable::observe(const NodeId& id, Address addr, SimTime now)
{
    int b = bucket_index(id);
    if (b >= kBuckets) return Update::self;
    auto& bucket = buckets_[static_cast<std::size_t>(b)];
    auto it = std::find_if(bucket.begin(), bucket.end(), [&](const Contact& c) { return c.id == id; });
    if (it != bucket.end()) {
        Contact c = *it;
        c.addr = addr;
        c.last_seen = now;
        bucket.erase(it);
        bucket.push_back(std::move(c));
        return Update::refreshed;
    }
    if (bucket.size() >= k_) return Update::bucket_full;
    bucket.push_back(Contact{id, point_of(id), addr, now});
    return Update::inserted;
}

std::optional<Contact> RoutingTable::least_recent(const NodeId& id) const
{
    int b = bucket_index(id);
    if (b >= kBuckets) return std::nullopt;
    const auto& bucket = buckets_[static_cast<std::size_t>(b)];
    if (bucket.empty()) return std::nullopt;
    return bucket.front();
}

bool RoutingTable::remove(const NodeId& id)
{
    int b = bucket_index(id);
    if (b >= kBuckets) return false;
    auto& bucket = buckets_[static_cast<std::size_t>(b)];
    auto it = std::find_if(bucket.begin(), bucket.end(), [&](const Contact& c) { return c.id == id; });
    if (it == bucket.end()) return false;
    bucket.erase(it);
    return true;
}

std::optional<Contact> RoutingTable::find(const NodeId& id) const
{
    int b = bucket_index(id);
    if (b >= kBuckets) return std::nullopt;
    for (const auto& c : buckets_[static_cast<std::size_t>(b)])
        if (c.id == id) return c;
    return std::nullopt;
}

std::vector<Contact> RoutingTable::all() const
{
    std::vector<Contact> out;
    for (const auto& bucket : buckets_) out.insert(out.end(), bucket.begin(), bucket.end());
    return out;
}

std::vector<Contact> RoutingTable::closest(const Point& target, std::size_t n) const
{
    auto out = all();
    std::sort(out.begin(), out.end(),
              [&](const Contact& a, const Contact& b) { return closer(a.point, b.point, target); });
    if (out.size() > n) out.resize(n);
    return out;
}

std::size_t RoutingTable::size() const
{
    std::size_t n = 0;
    for (const auto& bucket : buckets_) n += bucket.size();
    return n;
}

bool RoutingTable::audit() const
{
    std::set<NodeId> seen;
    for (int i = 0; i < kBuckets; ++i) {
        const auto& bucket = buckets_[static_cast<std::size_t>(i)];
        if (bucket.size() > k_) return false;
        for (std::size_t j = 0; j < bucket.size(); ++j) {
            if (common_prefix_bits(owner_, bucket[j].point) != i) return false;
            if (!seen.insert(bucket[j].id).second) return false;
            if (j > 0 && bucket[j - 1].last_seen > bucket[j].last_seen) return false;
        }
    }
    return true;
}

}  // namespace ipfs::routing
