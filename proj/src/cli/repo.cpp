#include <fstream>

#include "ipfs/cli/cli.hpp"
#include "ipfs/multiformats/multiaddr.hpp"

namespace ipfs::cli {

namespace fs = std::filesystem;

NodeConfig NodeConfig::from_kv(const KeyValueConfig& kv)
{
    NodeConfig c;
    c.difficulty = static_cast<int>(kv.get_int("identity.difficulty", c.difficulty));
    c.chunker = kv.get_or("chunker", c.chunker);
    c.chunk_size = static_cast<std::size_t>(kv.get_int("chunker.size", static_cast<std::int64_t>(c.chunk_size)));
    c.rabin.min = static_cast<std::size_t>(kv.get_int("chunker.rabin.min", static_cast<std::int64_t>(c.rabin.min)));
    c.rabin.avg = static_cast<std::size_t>(kv.get_int("chunker.rabin.avg", static_cast<std::int64_t>(c.rabin.avg)));
    c.rabin.max = static_cast<std::size_t>(kv.get_int("chunker.rabin.max", static_cast<std::int64_t>(c.rabin.max)));
    c.routing = kv.get_or("routing", c.routing);
    c.listen = kv.get_or("listen", c.listen);
    c.gc_low_water = static_cast<std::size_t>(kv.get_int("gc.low_water", static_cast<std::int64_t>(c.gc_low_water)));
    c.dns_fixture = kv.get_or("dns.fixture", c.dns_fixture);
    if (c.chunker != "rabin" && c.chunker != "fixed") throw ConfigError("chunker must be rabin or fixed");
    if (c.routing != "memory" && c.routing != "dht-sim") throw ConfigError("routing must be memory or dht-sim");
    if (c.difficulty < 0 || c.difficulty > identity::kMaxDifficulty) throw ConfigError("identity.difficulty out of range");
    try {
        multiformats::Multiaddr::parse(c.listen);
    } catch (const Error& e) {
        throw ConfigError("listen: " + std::string(e.what()));
    }
    return c;
}

KeyValueConfig NodeConfig::to_kv() const
{
    KeyValueConfig kv;
    kv.set("identity.difficulty", std::to_string(difficulty));
    kv.set("chunker", chunker);
    kv.set("chunker.size", std::to_string(chunk_size));
    kv.set("chunker.rabin.min", std::to_string(rabin.min));
    kv.set("chunker.rabin.avg", std::to_string(rabin.avg));
    kv.set("chunker.rabin.max", std::to_string(rabin.max));
    kv.set("routing", routing);
    kv.set("listen", listen);
    kv.set("gc.low_water", std::to_string(gc_low_water));
    kv.set("dns.fixture", dns_fixture);
    return kv;
}

std::unique_ptr<files::Chunker> NodeConfig::make_chunker() const
{
    if (chunker == "fixed") return std::make_unique<files::FixedChunker>(chunk_size);
    return std::make_unique<files::RabinChunker>(rabin);
}

namespace {

Bytes read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw RepoError("cannot read " + p.string());
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file_atomic(const fs::path& p, ByteView data)
{
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        if (!out) throw RepoError("cannot write " + tmp.string());
    }
    fs::rename(tmp, p);
}

}  // namespace

bool Repo::exists(const fs::path& path) { return fs::exists(path / kConfigFile) && fs::exists(path / kIdentityFile); }

void Repo::init(const fs::path& path, const NodeConfig& config, std::uint64_t seed, const std::string& passphrase)
{
    if (exists(path)) throw RepoError("repository already initialized at " + path.string());
    fs::create_directories(path);
    Rng rng(seed);
    auto id = identity::NodeIdentity::generate(config.difficulty, rng);
    write_file_atomic(path / kIdentityFile, id.save(passphrase, rng));
    config.to_kv().save((path / kConfigFile).string());
    routing::MemoryRoutingHub hub;
    hub.add_peer({id.node_id(), multiformats::Multiaddr::parse(config.listen)});
    write_file_atomic(path / kRoutingFile, hub.encode());
}

std::unique_ptr<Repo> Repo::open(const fs::path& path, const std::string& passphrase)
{
    if (!exists(path)) throw RepoError("no repository at " + path.string() + " (run init first)");
    auto repo = std::unique_ptr<Repo>(new Repo());
    repo->path_ = path;
    repo->config_ = NodeConfig::from_kv(KeyValueConfig::load((path / kConfigFile).string()));
    repo->identity_ = std::make_unique<identity::NodeIdentity>(
        identity::NodeIdentity::load(read_file(path / kIdentityFile), passphrase));
    repo->store_ = std::make_unique<blockstore::FsBlockStore>(path / "store");
    repo->hub_ = std::make_shared<routing::MemoryRoutingHub>();
    if (fs::exists(path / kRoutingFile))
        *repo->hub_ = routing::MemoryRoutingHub::decode(read_file(path / kRoutingFile));
    repo->routing_ = std::make_unique<routing::MemoryRouting>(repo->hub_, *repo->identity_,
                                                              multiformats::Multiaddr::parse(repo->config_.listen));
    return repo;
}

void Repo::save()
{
    write_file_atomic(path_ / kRoutingFile, hub_->encode());
    if (store_) store_->flush_access_times();
}

}  // namespace ipfs::cli
