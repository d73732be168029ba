#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ipfs/blockstore/blockstore.hpp"
#include "ipfs/common/kv_config.hpp"
#include "ipfs/files/files.hpp"
#include "ipfs/identity/identity.hpp"
#include "ipfs/routing/routing.hpp"

namespace ipfs::cli {

IPFS_DECLARE_ERROR(RepoError);

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kNoRepo = 2,
    kResolution = 3,
    kContent = 4,  // integrity, kind and decoding failures
    kFailure = 5,  // anything else (store, io)
};

// Repository settings, stored as key = value text at <repo>/config.
struct NodeConfig {
    int difficulty = 0;
    std::string chunker = "rabin";  // rabin | fixed
    std::size_t chunk_size = 256 * 1024;
    files::RabinParams rabin;
    std::string routing = "memory";  // memory | dht-sim
    std::string listen = "/sim/0";
    std::size_t gc_low_water = 0;    // blocks kept after gc
    std::string dns_fixture;         // TXT fixture file, empty for none

    static NodeConfig from_kv(const KeyValueConfig& kv);
    KeyValueConfig to_kv() const;
    std::unique_ptr<files::Chunker> make_chunker() const;
    bool operator==(const NodeConfig&) const = default;
};

// On-disk node state: config, identity, blocks, pins and the routing table
// the batch commands share.
class Repo {
public:
    static constexpr const char* kConfigFile = "config";
    static constexpr const char* kIdentityFile = "identity";
    static constexpr const char* kRoutingFile = "routing";

    // RepoError if the directory already holds a repository.
    static void init(const std::filesystem::path& path, const NodeConfig& config, std::uint64_t seed,
                     const std::string& passphrase);
    // RepoError if the directory is not an initialized repository.
    static std::unique_ptr<Repo> open(const std::filesystem::path& path, const std::string& passphrase);
    static bool exists(const std::filesystem::path& path);

    const std::filesystem::path& path() const { return path_; }
    NodeConfig& config() { return config_; }
    const identity::NodeIdentity& identity() const { return *identity_; }
    blockstore::FsBlockStore& store() { return *store_; }
    routing::Routing& routing() { return *routing_; }
    std::shared_ptr<routing::MemoryRoutingHub> hub() { return hub_; }
    // Writes the routing table and access times back to disk.
    void save();

    // Moves block ownership to a caller (the daemon's simulated node).
    std::unique_ptr<blockstore::FsBlockStore> release_store() { return std::move(store_); }

private:
    std::filesystem::path path_;
    NodeConfig config_;
    std::unique_ptr<identity::NodeIdentity> identity_;
    std::unique_ptr<blockstore::FsBlockStore> store_;
    std::shared_ptr<routing::MemoryRoutingHub> hub_;
    std::unique_ptr<routing::MemoryRouting> routing_;
};

// Runs one command line (argv[0] is the program name). Output goes to out,
// diagnostics to err; the return value is an ExitCode.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Exit code for an error kind name ("PathNotFound" -> kResolution, ...).
int exit_code_for(const std::string& kind);

}  // namespace ipfs::cli
