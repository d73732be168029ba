#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "ipfs/common/bytes.hpp"
#include "ipfs/common/errors.hpp"
#include "ipfs/multiformats/multihash.hpp"

namespace ipfs::blockstore {

using multiformats::Multihash;

IPFS_DECLARE_ERROR(BlockTooLarge);
IPFS_DECLARE_ERROR(StoreError);
IPFS_DECLARE_ERROR(IntegrityError);

class PartialPinError : public Error {
public:
    explicit PartialPinError(std::vector<Multihash> missing);
    const std::vector<Multihash>& missing() const noexcept { return missing_; }

private:
    std::vector<Multihash> missing_;
};

constexpr std::size_t kDefaultMaxBlockSize = 1 << 20;

// Enumerates the links of a block. Returns nullopt when the block cannot be
// obtained; the store has no opinion on block formats.
using LinkResolver = std::function<std::optional<std::vector<Multihash>>(const Multihash&)>;

struct PinSet {
    std::set<Multihash> direct;
    std::set<Multihash> recursive;

    bool operator==(const PinSet&) const = default;
};

struct StoreOptions {
    std::size_t max_block_size = kDefaultMaxBlockSize;
    multiformats::HashCode hash = multiformats::kDefaultHash;
};

// Content-addressed block storage with pinning and garbage collection.
//
// put/get/has may run concurrently from any thread. pin, unpin and gc are
// serialised against each other by a single maintenance lock.
class BlockStore {
public:
    explicit BlockStore(StoreOptions options) : options_(options) {}
    virtual ~BlockStore() = default;

    BlockStore(const BlockStore&) = delete;
    BlockStore& operator=(const BlockStore&) = delete;

    Multihash put(ByteView bytes);

    // Stores bytes that arrived under an externally supplied key. Throws
    // IntegrityError if the key does not match the content.
    void put_keyed(const Multihash& key, ByteView bytes);

    // Verifies the content hash before returning. A mismatch quarantines the
    // block and throws IntegrityError.
    std::optional<Bytes> get(const Multihash& key);

    bool has(const Multihash& key) const;
    std::size_t size() const;
    std::uint64_t total_bytes() const;
    std::vector<Multihash> keys() const;

    // Returns {key} or, when recursive, key plus every descendant reachable
    // through resolver. Nothing is recorded if any block is missing.
    std::set<Multihash> pin(const Multihash& key, bool recursive, const LinkResolver& resolver);
    void unpin(const Multihash& key, bool recursive);
    PinSet pins() const;

    // Union of direct pins and every recursive pin's closure.
    std::set<Multihash> pinned_closure(const LinkResolver& resolver) const;

    // Removes unpinned blocks, least recently accessed first, until at most
    // low_water blocks remain or nothing removable is left.
    std::vector<Multihash> gc(std::size_t low_water, const LinkResolver& resolver);

    // Logical access tick of the last put/get touching key (0 if unknown).
    std::uint64_t last_access(const Multihash& key) const;

    const StoreOptions& options() const { return options_; }

protected:
    // Backend primitives. Index bookkeeping (sizes, access order) lives in
    // the base class; backends only move bytes.
    virtual std::optional<Bytes> backend_read(const Multihash& key) const = 0;
    virtual void backend_write(const Multihash& key, ByteView bytes) = 0;
    virtual void backend_erase(const Multihash& key) = 0;
    virtual void backend_quarantine(const Multihash& key) = 0;
    virtual void backend_record_pin(bool add, bool recursive, const Multihash& key) = 0;

    // For backends that rebuild state on open.
    void index_insert(const Multihash& key, std::uint64_t size);
    void touch(const Multihash& key);
    void restore_access(const Multihash& key, std::uint64_t tick);
    void restore_pin(bool add, bool recursive, const Multihash& key);
    std::map<Multihash, std::uint64_t> access_snapshot() const;

private:
    void store_verified(const Multihash& key, ByteView bytes);
    std::set<Multihash> closure_of(const Multihash& root, const LinkResolver& resolver,
                                   std::vector<Multihash>* missing) const;

    StoreOptions options_;

    mutable std::shared_mutex data_mutex_;
    std::unordered_map<Multihash, std::uint64_t> index_;  // key -> byte size
    std::uint64_t total_bytes_ = 0;

    mutable std::mutex access_mutex_;
    std::unordered_map<Multihash, std::uint64_t> access_;
    std::atomic<std::uint64_t> clock_{0};

    mutable std::mutex maintenance_mutex_;
    PinSet pins_;
};

// RAM-only store for simulations and caches.
class MemoryBlockStore final : public BlockStore {
public:
    explicit MemoryBlockStore(StoreOptions options = {}) : BlockStore(options) {}

    // Test hook: replaces stored bytes without touching the index.
    void overwrite_raw(const Multihash& key, Bytes bytes);
    std::size_t quarantined() const;

protected:
    std::optional<Bytes> backend_read(const Multihash& key) const override;
    void backend_write(const Multihash& key, ByteView bytes) override;
    void backend_erase(const Multihash& key) override;
    void backend_quarantine(const Multihash& key) override;
    void backend_record_pin(bool, bool, const Multihash&) override {}

private:
    mutable std::mutex mutex_;
    std::unordered_map<Multihash, Bytes> blocks_;
    std::unordered_map<Multihash, Bytes> quarantine_;
};

// One file per block under <root>/blocks/<first two chars>/<base58 key>,
// written to <root>/tmp and renamed into place. Pins are an append-only
// journal at <root>/pins ("P|U d|r <key>" per line).
class FsBlockStore final : public BlockStore {
public:
    explicit FsBlockStore(std::filesystem::path root, StoreOptions options = {});
    ~FsBlockStore() override;

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path block_path(const Multihash& key) const;

    // Persists access ticks (best effort; also done on destruction).
    void flush_access_times() const;

    // Test hook: the next write leaves its temp file behind and fails
    // before the rename, as a crash would.
    void fail_next_write_before_rename() { fail_next_write_ = true; }

protected:
    std::optional<Bytes> backend_read(const Multihash& key) const override;
    void backend_write(const Multihash& key, ByteView bytes) override;
    void backend_erase(const Multihash& key) override;
    void backend_quarantine(const Multihash& key) override;
    void backend_record_pin(bool add, bool recursive, const Multihash& key) override;

private:
    void load();

    std::filesystem::path root_;
    std::atomic<std::uint64_t> tmp_counter_{0};
    bool fail_next_write_ = false;
    std::mutex journal_mutex_;
};

}  // namespace ipfs::blockstore
