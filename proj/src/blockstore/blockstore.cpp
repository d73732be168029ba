#include "ipfs/blockstore/blockstore.hpp"

#include <algorithm>
#include <deque>

namespace ipfs::blockstore {

namespace {
std::string describe_missing(const std::vector<Multihash>& missing)
{
    std::string out = "missing " + std::to_string(missing.size()) + " block(s):";
    for (const auto& k : missing) out += " " + k.to_string();
    return out;
}
}  // namespace

PartialPinError::PartialPinError(std::vector<Multihash> missing)
    : Error("PartialPinError", describe_missing(missing)), missing_(std::move(missing))
{
}

Multihash BlockStore::put(ByteView bytes)
{
    if (bytes.size() > options_.max_block_size)
        throw BlockTooLarge("block of " + std::to_string(bytes.size()) + " bytes exceeds limit of " +
                            std::to_string(options_.max_block_size));
    auto key = Multihash::of(bytes, options_.hash);
    store_verified(key, bytes);
    return key;
}

void BlockStore::put_keyed(const Multihash& key, ByteView bytes)
{
    if (bytes.size() > options_.max_block_size)
        throw BlockTooLarge("block of " + std::to_string(bytes.size()) + " bytes exceeds limit of " +
                            std::to_string(options_.max_block_size));
    if (!key.verify(bytes)) throw IntegrityError("content does not match key " + key.to_string());
    store_verified(key, bytes);
}

void BlockStore::store_verified(const Multihash& key, ByteView bytes)
{
    {
        std::unique_lock lock(data_mutex_);
        if (!index_.count(key)) {
            backend_write(key, bytes);
            index_.emplace(key, bytes.size());
            total_bytes_ += bytes.size();
        }
    }
    touch(key);
}

std::optional<Bytes> BlockStore::get(const Multihash& key)
{
    std::optional<Bytes> bytes;
    {
        std::shared_lock lock(data_mutex_);
        if (!index_.count(key)) return std::nullopt;
        bytes = backend_read(key);
    }
    if (!bytes || !key.verify(*bytes)) {
        std::unique_lock lock(data_mutex_);
        if (auto it = index_.find(key); it != index_.end()) {
            total_bytes_ -= it->second;
            index_.erase(it);
            backend_quarantine(key);
        }
        throw IntegrityError("stored block " + key.to_string() + " failed verification and was quarantined");
    }
    touch(key);
    return bytes;
}

bool BlockStore::has(const Multihash& key) const
{
    std::shared_lock lock(data_mutex_);
    return index_.count(key) != 0;
}

std::size_t BlockStore::size() const
{
    std::shared_lock lock(data_mutex_);
    return index_.size();
}

std::uint64_t BlockStore::total_bytes() const
{
    std::shared_lock lock(data_mutex_);
    return total_bytes_;
}

std::vector<Multihash> BlockStore::keys() const
{
    std::vector<Multihash> out;
    {
        std::shared_lock lock(data_mutex_);
        out.reserve(index_.size());
        for (const auto& [k, _] : index_) out.push_back(k);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::set<Multihash> BlockStore::closure_of(const Multihash& root, const LinkResolver& resolver,
                                           std::vector<Multihash>* missing) const
{
    std::set<Multihash> seen{root};
    std::deque<Multihash> queue{root};
    while (!queue.empty()) {
        auto key = queue.front();
        queue.pop_front();
        auto links = resolver ? resolver(key) : std::optional<std::vector<Multihash>>(std::vector<Multihash>{});
        if (!links) {
            if (missing) missing->push_back(key);
            continue;
        }
        for (const auto& child : *links)
            if (seen.insert(child).second) queue.push_back(child);
    }
    return seen;
}

std::set<Multihash> BlockStore::pin(const Multihash& key, bool recursive, const LinkResolver& resolver)
{
    std::lock_guard lock(maintenance_mutex_);
    if (!has(key)) throw PartialPinError({key});
    std::set<Multihash> pinned{key};
    if (recursive) {
        std::vector<Multihash> missing;
        pinned = closure_of(key, resolver, &missing);
        if (!missing.empty()) throw PartialPinError(std::move(missing));
        pins_.recursive.insert(key);
    } else {
        pins_.direct.insert(key);
    }
    backend_record_pin(true, recursive, key);
    return pinned;
}

void BlockStore::unpin(const Multihash& key, bool recursive)
{
    std::lock_guard lock(maintenance_mutex_);
    auto& set = recursive ? pins_.recursive : pins_.direct;
    if (set.erase(key)) backend_record_pin(false, recursive, key);
}

PinSet BlockStore::pins() const
{
    std::lock_guard lock(maintenance_mutex_);
    return pins_;
}

std::set<Multihash> BlockStore::pinned_closure(const LinkResolver& resolver) const
{
    PinSet snapshot = pins();
    std::set<Multihash> out = snapshot.direct;
    for (const auto& root : snapshot.recursive) {
        auto c = closure_of(root, resolver, nullptr);
        out.insert(c.begin(), c.end());
    }
    return out;
}

std::vector<Multihash> BlockStore::gc(std::size_t low_water, const LinkResolver& resolver)
{
    std::lock_guard lock(maintenance_mutex_);
    std::set<Multihash> keep = pins_.direct;
    for (const auto& root : pins_.recursive) {
        auto c = closure_of(root, resolver, nullptr);
        keep.insert(c.begin(), c.end());
    }

    std::vector<std::pair<std::uint64_t, Multihash>> candidates;
    for (const auto& key : keys())
        if (!keep.count(key)) candidates.emplace_back(last_access(key), key);
    std::sort(candidates.begin(), candidates.end());

    std::vector<Multihash> removed;
    for (const auto& [tick, key] : candidates) {
        if (size() <= low_water) break;
        {
            std::unique_lock data(data_mutex_);
            auto it = index_.find(key);
            if (it == index_.end()) continue;
            total_bytes_ -= it->second;
            index_.erase(it);
            backend_erase(key);
        }
        {
            std::lock_guard a(access_mutex_);
            access_.erase(key);
        }
        removed.push_back(key);
    }
    return removed;
}

std::uint64_t BlockStore::last_access(const Multihash& key) const
{
    std::lock_guard lock(access_mutex_);
    auto it = access_.find(key);
    return it == access_.end() ? 0 : it->second;
}

void BlockStore::index_insert(const Multihash& key, std::uint64_t size)
{
    std::unique_lock lock(data_mutex_);
    if (index_.emplace(key, size).second) total_bytes_ += size;
}

void BlockStore::touch(const Multihash& key)
{
    auto tick = ++clock_;
    std::lock_guard lock(access_mutex_);
    access_[key] = tick;
}

void BlockStore::restore_access(const Multihash& key, std::uint64_t tick)
{
    std::lock_guard lock(access_mutex_);
    access_[key] = tick;
    auto current = clock_.load();
    while (current < tick && !clock_.compare_exchange_weak(current, tick)) {
    }
}

void BlockStore::restore_pin(bool add, bool recursive, const Multihash& key)
{
    std::lock_guard lock(maintenance_mutex_);
    auto& set = recursive ? pins_.recursive : pins_.direct;
    if (add)
        set.insert(key);
    else
        set.erase(key);
}

std::map<Multihash, std::uint64_t> BlockStore::access_snapshot() const
{
    std::lock_guard lock(access_mutex_);
    return {access_.begin(), access_.end()};
}

// --- MemoryBlockStore ---

std::optional<Bytes> MemoryBlockStore::backend_read(const Multihash& key) const
{
    std::lock_guard lock(mutex_);
    auto it = blocks_.find(key);
    if (it == blocks_.end()) return std::nullopt;
    return it->second;
}

void MemoryBlockStore::backend_write(const Multihash& key, ByteView bytes)
{
    std::lock_guard lock(mutex_);
    blocks_[key] = Bytes(bytes.begin(), bytes.end());
}

void MemoryBlockStore::backend_erase(const Multihash& key)
{
    std::lock_guard lock(mutex_);
    blocks_.erase(key);
}

void MemoryBlockStore::backend_quarantine(const Multihash& key)
{
    std::lock_guard lock(mutex_);
    auto it = blocks_.find(key);
    if (it == blocks_.end()) return;
    quarantine_[key] = std::move(it->second);
    blocks_.erase(it);
}

void MemoryBlockStore::overwrite_raw(const Multihash& key, Bytes bytes)
{
    std::lock_guard lock(mutex_);
    blocks_[key] = std::move(bytes);
}

std::size_t MemoryBlockStore::quarantined() const
{
    std::lock_guard lock(mutex_);
    return quarantine_.size();
}

}  // namespace ipfs::blockstore
