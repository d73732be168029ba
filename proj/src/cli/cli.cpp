#include "ipfs/cli/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <random>
#include <set>

#include "ipfs/ipns/ipns.hpp"
#include "ipfs/merkledag/dag.hpp"
#include "ipfs/node/node.hpp"

namespace ipfs::cli {

namespace fs = std::filesystem;
using multiformats::Multihash;

int exit_code_for(const std::string& kind)
{
    static const std::set<std::string> resolution = {"PathNotFound", "NameNotFound",    "NameAuthError",
                                                     "RecursionLimit", "PathSyntaxError", "FetchError",
                                                     "PartialPinError", "KeyNotFound",   "NoKey"};
    static const std::set<std::string> content = {"IntegrityError", "KindError",      "DecodeError",  "SignatureError",
                                                  "DecryptError",   "TruncatedError", "RegistryError", "LengthMismatch",
                                                  "AlphabetError",  "LengthError",    "PayloadError"};
    static const std::set<std::string> usage = {"ConfigError", "ParamError", "NameError"};
    if (kind == "RepoError") return kNoRepo;
    if (resolution.count(kind)) return kResolution;
    if (content.count(kind)) return kContent;
    if (usage.count(kind)) return kUsage;
    return kFailure;
}

namespace {

struct Globals {
    std::string repo = ".ipfs";
    bool hex = false;
    std::string passphrase;
};

std::string show(const Multihash& h, const Globals& g) { return g.hex ? to_hex(h.encode()) : h.to_string(); }

struct Session {
    std::unique_ptr<Repo> repo;
    std::unique_ptr<dag::DagReader> reader;
    std::unique_ptr<ipns::FixtureDns> dns;

    explicit Session(const Globals& g) : repo(Repo::open(g.repo, g.passphrase))
    {
        reader = std::make_unique<dag::DagReader>(dag::store_getter(repo->store()));
        if (!repo->config().dns_fixture.empty()) {
            fs::path p = repo->config().dns_fixture;
            if (p.is_relative()) p = repo->path() / p;
            dns = std::make_unique<ipns::FixtureDns>(ipns::FixtureDns::load(p.string()));
        }
    }

    // Batch commands run at virtual time zero.
    ipns::Resolver resolver() const
    {
        ipns::Resolver r;
        r.routing = &repo->routing();
        r.reader = reader.get();
        r.dns = dns.get();
        return r;
    }

    Multihash resolve(const std::string& path) const { return resolver().resolve(path); }
    blockstore::LinkResolver links() const { return dag::link_resolver(*reader); }
};

struct ChunkFlags {
    std::string chunker;
    std::size_t size = 0, min = 0, avg = 0, max = 0;

    std::unique_ptr<files::Chunker> make(NodeConfig cfg) const
    {
        if (!chunker.empty()) cfg.chunker = chunker;
        if (size) cfg.chunk_size = size;
        if (min) cfg.rabin.min = min;
        if (avg) cfg.rabin.avg = avg;
        if (max) cfg.rabin.max = max;
        return NodeConfig::from_kv(cfg.to_kv()).make_chunker();
    }
};

void add_chunk_flags(CLI::App* cmd, ChunkFlags& f)
{
    cmd->add_option("--chunker", f.chunker, "rabin or fixed")->envname("IPFS_CHUNKER");
    cmd->add_option("--chunk-size", f.size, "fixed chunk size in bytes")->envname("IPFS_CHUNK_SIZE");
    cmd->add_option("--rabin-min", f.min)->envname("IPFS_RABIN_MIN");
    cmd->add_option("--rabin-avg", f.avg)->envname("IPFS_RABIN_AVG");
    cmd->add_option("--rabin-max", f.max)->envname("IPFS_RABIN_MAX");
}

std::uint64_t fresh_seed() { return (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}(); }

int run_daemon(Session& s, const std::string& scenario_path, const Globals& g, std::ostream& out)
{
    auto cfg = netsim::ScenarioConfig::load(scenario_path);
    auto& repo = *s.repo;
    if (!identity::verify_peer(repo.identity().node_id(), repo.identity().public_key(), cfg.difficulty))
        throw ConfigError("repository identity does not meet the scenario difficulty of " +
                          std::to_string(cfg.difficulty) + " bits");
    auto pins = repo.store().pins();
    auto swarm = node::Swarm::from_scenario(cfg);
    auto& net = swarm->net();
    node::NodeOptions opts;
    opts.difficulty = cfg.difficulty;
    node::Node local(net, repo.identity(), opts, repo.release_store());
    swarm->bootstrap(local, cfg.bootstrap);
    out << "swarm: " << swarm->size() << " peers, local node " << show(local.id(), g) << " at /sim/"
        << local.address() << "\n";

    std::vector<Multihash> roots(pins.recursive.begin(), pins.recursive.end());
    for (const auto& r : roots) {
        local.provide(r);
        out << "provide " << show(r, g) << "\n";
    }
    auto lookups = static_cast<std::size_t>(cfg.raw.get_int("demo.lookups", 4));
    for (std::size_t i = 0; i < lookups && swarm->size() > 0; ++i) {
        auto& peer = swarm->node(swarm->rng().uniform(swarm->size()));
        routing::LookupStats stats;
        auto found = peer.dht().find_peer_counted(local.id(), stats);
        out << "lookup from /sim/" << peer.address() << ": " << (found ? "found" : "missed") << " after "
            << stats.contacted << " contacts";
        if (!roots.empty()) {
            auto& root = roots[i % roots.size()];
            auto providers = peer.dht().find_value_peers(root, 1);
            out << ", " << providers.providers.size() << " provider(s) of " << show(root, g);
        }
        out << "\n";
    }
    net.run_until(std::max(net.now(), cfg.horizon));
    const auto& st = net.stats();
    out << "time " << format_duration(net.now()) << "\n";
    out << "frames sent " << st.sent << " delivered " << st.delivered << " dropped " << st.dropped << " corrupted "
        << st.corrupted << "\n";
    out << "trace " << net.trace_digest() << "\n";
    return kOk;
}


}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Content-addressed block store, Merkle DAG files and self-certified names", "ipfs"};
    app.require_subcommand(1);
    Globals g;
    if (const char* p = std::getenv("IPFS_PASSPHRASE")) g.passphrase = p;
    app.add_option("--repo", g.repo, "repository directory")->envname("IPFS_REPO");
    app.add_flag("--hex", g.hex, "print hashes as hex")->envname("IPFS_HEX");

    int code = kOk;
    std::function<void()> action;

    // init
    NodeConfig init_cfg;
    std::uint64_t seed = 0;
    bool seed_given = false;
    ChunkFlags init_chunk;
    auto* init = app.add_subcommand("init", "create a repository");
    init->add_option("--difficulty", init_cfg.difficulty, "identity puzzle bits")->envname("IPFS_DIFFICULTY");
    init->add_option("--routing", init_cfg.routing, "memory or dht-sim")->envname("IPFS_ROUTING");
    init->add_option("--listen", init_cfg.listen, "listen multiaddr")->envname("IPFS_LISTEN");
    init->add_option("--gc-low-water", init_cfg.gc_low_water)->envname("IPFS_GC_LOW_WATER");
    init->add_option("--dns-fixture", init_cfg.dns_fixture, "TXT fixture file")->envname("IPFS_DNS_FIXTURE");
    init->add_option("--seed", seed, "key generation seed")->envname("IPFS_SEED")->each([&](const std::string&) {
        seed_given = true;
    });
    add_chunk_flags(init, init_chunk);
    init->callback([&] {
        auto cfg = init_cfg;
        if (!init_chunk.chunker.empty()) cfg.chunker = init_chunk.chunker;
        if (init_chunk.size) cfg.chunk_size = init_chunk.size;
        if (init_chunk.min) cfg.rabin.min = init_chunk.min;
        if (init_chunk.avg) cfg.rabin.avg = init_chunk.avg;
        if (init_chunk.max) cfg.rabin.max = init_chunk.max;
        cfg = NodeConfig::from_kv(cfg.to_kv());
        cfg.make_chunker();
        Repo::init(g.repo, cfg, seed_given ? seed : fresh_seed(), g.passphrase);
        auto repo = Repo::open(g.repo, g.passphrase);
        out << "initialized repository at " << g.repo << "\n";
        out << "peer identity: " << show(repo->identity().node_id(), g) << "\n";
    });

    // id
    app.add_subcommand("id", "print this node's identity")->callback([&] {
        Session s(g);
        out << show(s.repo->identity().node_id(), g) << "\n";
    });

    // add
    std::string add_path;
    bool add_no_pin = false;
    ChunkFlags add_chunk;
    auto* add = app.add_subcommand("add", "add a file or directory");
    add->add_option("path", add_path)->required();
    add->add_flag("--no-pin", add_no_pin, "leave the result unpinned");
    add_chunk_flags(add, add_chunk);
    add->callback([&] {
        Session s(g);
        auto chunker = add_chunk.make(s.repo->config());
        if (!fs::exists(add_path)) throw blockstore::StoreError("no such file or directory: " + add_path);
        auto root = files::add_path(add_path, *chunker, s.repo->store());
        if (!add_no_pin) s.repo->store().pin(root, true, s.links());
        s.repo->routing().provide(root);
        s.repo->save();
        out << "added " << show(root, g) << " " << fs::path(add_path).filename().string() << "\n";
    });

    // cat
    std::string cat_path;
    auto* cat = app.add_subcommand("cat", "print a file");
    cat->add_option("path", cat_path)->required();
    cat->callback([&] {
        Session s(g);
        auto data = files::cat(s.resolve(cat_path), *s.reader);
        out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    });

    // ls
    std::string ls_path;
    auto* ls = app.add_subcommand("ls", "list the links of an object");
    ls->add_option("path", ls_path)->required();
    ls->callback([&] {
        Session s(g);
        for (const auto& l : dag::list_links(s.resolve(ls_path), *s.reader)) {
            out << show(l.hash, g) << " " << l.size;
            if (!l.name.empty()) out << " " << l.name;
            out << "\n";
        }
    });

    // refs
    std::string refs_path;
    bool refs_recursive = false;
    auto* refs = app.add_subcommand("refs", "list referenced objects");
    refs->add_option("path", refs_path)->required();
    refs->add_flag("-r,--recursive", refs_recursive);
    refs->callback([&] {
        Session s(g);
        auto key = s.resolve(refs_path);
        if (refs_recursive) {
            for (const auto& h : dag::refs_recursive(key, *s.reader)) out << show(h, g) << "\n";
        } else {
            std::set<Multihash> seen;
            for (const auto& l : dag::list_links(key, *s.reader))
                if (seen.insert(l.hash).second) out << show(l.hash, g) << "\n";
        }
    });

    // pin
    auto* pin = app.add_subcommand("pin", "manage pins");
    pin->require_subcommand(1);
    std::string pin_key;
    bool pin_recursive = false;
    for (const char* verb : {"add", "rm"}) {
        auto* sub = pin->add_subcommand(verb, std::string(verb) + " a pin");
        sub->add_option("key", pin_key)->required();
        sub->add_flag("-r,--recursive", pin_recursive);
        bool adding = std::string(verb) == "add";
        sub->callback([&, adding] {
            Session s(g);
            auto key = s.resolve(pin_key);
            if (adding)
                s.repo->store().pin(key, pin_recursive, s.links());
            else
                s.repo->store().unpin(key, pin_recursive);
            s.repo->save();
            out << (adding ? "pinned " : "unpinned ") << show(key, g) << (pin_recursive ? " recursively" : " directly")
                << "\n";
        });
    }
    pin->add_subcommand("ls", "list pins")->callback([&] {
        Session s(g);
        auto pins = s.repo->store().pins();
        for (const auto& k : pins.recursive) out << show(k, g) << " recursive\n";
        for (const auto& k : pins.direct) out << show(k, g) << " direct\n";
    });

    // gc
    std::optional<std::size_t> gc_low;
    auto* gc = app.add_subcommand("gc", "remove unpinned blocks");
    gc->add_option("--low-water", gc_low, "blocks to keep")->envname("IPFS_GC_LOW_WATER");
    gc->callback([&] {
        Session s(g);
        auto removed = s.repo->store().gc(gc_low.value_or(s.repo->config().gc_low_water), s.links());
        s.repo->save();
        for (const auto& k : removed) out << "removed " << show(k, g) << "\n";
        out << "gc: removed " << removed.size() << " blocks, " << s.repo->store().size() << " remain\n";
    });

    // publish
    std::string pub_path, pub_message = "published", pub_date;
    bool pub_history = false;
    auto* publish = app.add_subcommand("publish", "point this node's name at an object");
    publish->add_option("key", pub_path)->required();
    publish->add_flag("--with-history", pub_history, "wrap the object in a commit chain");
    publish->add_option("-m,--message", pub_message, "commit message for --with-history");
    publish->add_option("--date", pub_date, "commit date, YYYY-MM-DD HH:MM:SSZ")->envname("IPFS_DATE");
    publish->callback([&] {
        Session s(g);
        auto key = s.resolve(pub_path);
        if (!s.repo->store().has(key)) throw dag::FetchError(key, {}, "object is not stored locally");
        s.repo->routing().provide(key);
        auto date = pub_date.empty() ? files::utc_date(0) : pub_date;
        auto record = pub_history ? ipns::publish_with_history(s.repo->identity(), key, s.repo->store(), s.resolver(),
                                                               pub_message, date)
                                  : ipns::publish_name(s.repo->identity(), key, s.repo->routing());
        // gc must not strand the name
        s.repo->store().pin(record.value, true, s.links());
        s.repo->save();
        out << "published /ipns/" << show(record.publisher, g) << " -> /ipfs/" << show(record.value, g) << " seq "
            << record.sequence << "\n";
    });

    // link
    std::string link_path, link_target;
    auto* link = app.add_subcommand("link", "link another node's name into this node's namespace");
    link->add_option("path", link_path, "path inside this node's namespace, e.g. friends/bob")->required();
    link->add_option("target", link_target, "NodeId of the linked namespace")->required();
    link->callback([&] {
        Session s(g);
        auto parts = dag::split_path(link_path);
        auto target = Multihash::parse(ipns::NamePath::parse(link_target).head);
        auto root = ipns::peer_link(s.repo->identity(), parts, target, s.repo->store(), s.resolver());
        s.repo->store().pin(root, true, s.links());
        s.repo->save();
        out << "linked /ipns/" << show(s.repo->identity().node_id(), g) << "/" << link_path << " -> /ipns/"
            << show(target, g) << "\n";
    });

    // resolve
    std::string res_path;
    auto* resolve = app.add_subcommand("resolve", "resolve a name path to an object");
    resolve->add_option("path", res_path)->required();
    resolve->callback([&] {
        Session s(g);
        out << "/ipfs/" << show(s.resolve(res_path), g) << "\n";
    });

    // file-cat
    std::string fc_path;
    bool fc_json = false;
    auto* file_cat = app.add_subcommand("file-cat", "print a file object");
    file_cat->add_option("path", fc_path)->required();
    file_cat->add_flag("--json", fc_json, "print the text object form");
    file_cat->callback([&] {
        Session s(g);
        auto key = s.resolve(fc_path);
        auto obj = s.reader->object(key);
        auto kind = files::kind_of(obj);
        if (!fc_json && (kind == files::Kind::blob || kind == files::Kind::list)) {
            auto data = files::cat(key, *s.reader);
            out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
            return;
        }
        auto text = files::file_json(obj);
        out << text << "\n";
    });

    // daemon
    std::string scenario;
    auto* daemon = app.add_subcommand("daemon", "run the node inside a simulated network");
    daemon->add_option("--sim", scenario, "scenario file")->required()->envname("IPFS_SIM");
    daemon->callback([&] {
        Session s(g);
        code = run_daemon(s, scenario, g, out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        auto rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kUsage;
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    out.flush();
    return code;
}

}  // namespace ipfs::cli
