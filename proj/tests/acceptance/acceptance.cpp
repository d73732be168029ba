// Acceptance run: one PASS/FAIL line per criterion, with the measured
// numbers. Exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ipfs/bitswap/bitswap.hpp"
#include "ipfs/blockstore/blockstore.hpp"
#include "ipfs/files/files.hpp"
#include "ipfs/ipns/ipns.hpp"
#include "ipfs/merkledag/dag.hpp"
#include "ipfs/multiformats/base58.hpp"
#include "ipfs/multiformats/multiaddr.hpp"
#include "ipfs/multiformats/multihash.hpp"
#include "ipfs/node/node.hpp"
#include "ipfs/routing/dht.hpp"

using namespace ipfs;
using namespace std::chrono_literals;
using multiformats::Multihash;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 3)
{
    std::ostringstream o;
    o << std::fixed << std::setprecision(prec) << v;
    return o.str();
}

double sim_seconds(SimTime t) { return std::chrono::duration<double>(t).count(); }

// Strategy for the criteria that are about something other than the sigmoid.
struct AlwaysSend : bitswap::Strategy {
    std::string name() const override { return "always"; }
    double send_probability(const bitswap::Ledger&) const override { return 1.0; }
};

std::unique_ptr<node::Swarm> make_swarm(std::size_t n, std::uint64_t seed, node::NodeOptions opts = {})
{
    auto s = std::make_unique<node::Swarm>(seed);
    s->net().set_default_link({5ms, 25ms, 0.0, 0});
    s->spawn_all({n, 4, std::move(opts)});
    return s;
}

// --- 1. sigmoid ---

// 1 - 1/(1 + e^(6-3r)) evaluated to 25 digits offline.
constexpr double kP0 = 0.9975273768433652256659401;
constexpr double kP1 = 0.9525741268224332191211518;
constexpr double kP3 = 0.04742587317756678087884815;
constexpr double kP4 = 0.002472623156634774334059907;

Outcome sigmoid()
{
    auto t0 = Clock::now();
    bool exact = bitswap::send_probability(2.0) == 0.5;
    double e0 = std::abs(bitswap::send_probability(0.0) - kP0);
    double e4 = std::abs(bitswap::send_probability(4.0) - kP4);
    bool close = e0 < 1e-9 && e4 < 1e-9 && std::abs(bitswap::send_probability(1.0) - kP1) < 1e-9 &&
                 std::abs(bitswap::send_probability(3.0) - kP3) < 1e-9;

    // Draws go through the strategy on ledgers whose ratio is exactly r.
    bitswap::SigmoidStrategy strategy;
    Rng rng(1);
    double worst = 0;
    std::string freqs;
    for (int r = 0; r <= 4; ++r) {
        bitswap::Ledger l;
        l.bytes_recv = 999;
        l.bytes_sent = static_cast<std::uint64_t>(r) * 1000;
        int sends = 0;
        for (int i = 0; i < 10000; ++i) sends += rng.bernoulli(strategy.send_probability(l));
        double f = sends / 10000.0;
        worst = std::max(worst, std::abs(f - bitswap::send_probability(r)));
        freqs += (r ? " " : "") + fmt(f, 4);
    }
    double secs = seconds_since(t0);
    return {exact && close && worst <= 0.01 && secs < 5.0,
            "P(2)=0.5 " + std::string(exact ? "exact" : "inexact") + ", |dP0|=" + fmt(e0 * 1e12, 3) +
                "e-12, |dP4|=" + fmt(e4 * 1e12, 3) + "e-12, freq[0..4]=" + freqs + ", max dev " + fmt(worst, 4) +
                ", " + fmt(secs, 2) + " s"};
}

// --- 2. lookup cost ---

std::vector<std::size_t> lookup_contacts(std::uint64_t seed)
{
    auto s = make_swarm(512, seed);
    Rng rng(seed + 100);
    std::vector<std::size_t> contacts;
    for (int i = 0; i < 100; ++i) {
        auto& from = s->node(rng.uniform(s->size()));
        auto& to = s->node(rng.uniform(s->size()));
        routing::LookupStats stats;
        auto found = from.dht().find_peer_counted(to.id(), stats);
        if (found != routing::Multiaddr::sim(to.address())) contacts.push_back(SIZE_MAX);
        else contacts.push_back(stats.contacted);
    }
    return contacts;
}

Outcome kademlia()
{
    auto t0 = Clock::now();
    auto a = lookup_contacts(42);
    double secs = seconds_since(t0);
    auto b = lookup_contacts(42);
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    double median = (sorted[49] + sorted[50]) / 2.0;
    std::size_t failed = std::count(a.begin(), a.end(), SIZE_MAX);
    bool same = a == b;
    return {median <= 27 && same && secs < 60.0,
            "median contacts " + fmt(median, 1) + " (bound 27), max " + std::to_string(sorted[99 - failed]) + ", " +
                std::to_string(failed) + " unresolved, rerun " + (same ? "identical" : "DIFFERENT") + ", " +
                fmt(secs, 2) + " s"};
}

// --- 3. disjoint paths under drop-all adversaries ---

Outcome disjoint_paths()
{
    auto t0 = Clock::now();
    auto s = make_swarm(256, 7);
    std::set<netsim::Address> bad;
    for (auto a : s->net().assign_adversaries({netsim::Behavior::drop_all, 0.5})) bad.insert(a);
    std::vector<node::Node*> honest;
    for (std::size_t i = 0; i < s->size(); ++i)
        if (!bad.count(s->node(i).address())) honest.push_back(&s->node(i));
    Rng rng(8);
    int ok = 0;
    for (int t = 0; t < 200; ++t) {
        auto* from = honest[rng.uniform(honest.size())];
        auto* to = honest[rng.uniform(honest.size())];
        if (from->dht().disjoint_lookup(to->id(), 8) == routing::Multiaddr::sim(to->address())) ++ok;
    }
    double rate = ok / 200.0;
    double secs = seconds_since(t0);
    return {rate >= 0.75 && secs < 120.0, std::to_string(bad.size()) + " of 256 drop everything, success " +
                                              fmt(rate, 3) + " (bound 0.75), " + fmt(secs, 2) + " s"};
}

// --- 4. end-to-end exchange ---

bool mirrored(node::Node& a, node::Node& b)
{
    auto la = a.bitswap().ledger_or_zero(b.id());
    auto lb = b.bitswap().ledger_or_zero(a.id());
    return la.mirrors(lb);
}

// Blocks in flight on either side of the pair.
std::size_t unacked(node::Node& a, node::Node& b)
{
    std::size_t n = 0;
    if (auto* s = a.bitswap().session(b.id())) n += s->in_flight.size();
    if (auto* s = b.bitswap().session(a.id())) n += s->in_flight.size();
    return n;
}

struct Exchange {
    bool identical = false;
    bool mirror = false;
    bitswap::Ledger a_view;
    double took = 0;  // simulated seconds until B holds the whole file
};

// A adds 8 MiB with the rabin chunker; B finds A through DHT provider
// records and pulls the graph over BitSwap. With two_sided, B also offers
// a file of its own that A fetches at the same time.
Exchange exchange(node::NodeOptions a_opts, bool two_sided)
{
    auto s = make_swarm(30, 4);
    auto& a = s->spawn(a_opts, 4);
    auto& b = s->spawn({}, 4);
    Rng rng(4);
    files::RabinChunker rabin;
    auto data = rng.bytes(8u << 20);
    auto root = a.add(data, rabin);
    std::optional<Multihash> offer_root;
    if (two_sided) offer_root = b.add(rng.bytes(8u << 20), rabin);

    auto& net = s->net();
    auto start = net.now();
    b.start_fetch(root);
    if (offer_root) a.start_fetch(*offer_root);
    // need_list is cheap; has_dag walks the graph, so it only runs at the end.
    auto done = [&](node::Node& n, const Multihash& k) { return n.bitswap().need_list().empty() && n.has_dag(k); };
    net.run_until([&] { return done(b, root); }, start + std::chrono::hours(2));
    Exchange x;
    x.took = sim_seconds(net.now() - start);
    if (offer_root) net.run_until([&] { return done(a, *offer_root); }, net.now() + std::chrono::hours(2));
    net.run_until([&] { return unacked(a, b) == 0; }, net.now() + 5min);
    try {
        x.identical = files::cat(root, b.local_reader()) == data;
    } catch (const Error&) {
    }
    x.mirror = mirrored(a, b);
    x.a_view = a.bitswap().ledger_or_zero(b.id());
    return x;
}

Outcome end_to_end()
{
    auto t0 = Clock::now();
    // B has nothing A wants, so A seeds optimistically.
    node::NodeOptions seeder;
    seeder.strategy = std::make_shared<AlwaysSend>();
    auto x = exchange(seeder, false);
    // For reference: the sigmoid on both sides, trading two files.
    auto trade = exchange({}, true);
    return {x.identical && x.mirror && x.took < 60.0,
            std::string("always-send seeder: cat ") + (x.identical ? "identical" : "DIFFERS") + ", ledgers " +
                (x.mirror ? "mirror" : "DO NOT mirror") + " (A sent " + std::to_string(x.a_view.bytes_sent) +
                "), retrieval " + fmt(x.took, 1) + " s simulated (bound 60); sigmoid two-sided trade: " +
                fmt(trade.took, 1) + " s simulated, cat " + (trade.identical ? "identical" : "DIFFERS") +
                ", ledgers " + (trade.mirror ? "mirror" : "DO NOT mirror") + "; " + fmt(seconds_since(t0), 2) +
                " s wall"};
}

// --- 5. leech starvation ---

Outcome leech()
{
    auto t0 = Clock::now();
    auto s = std::make_unique<node::Swarm>(5);
    s->net().set_default_link({5ms, 25ms, 0.0, 0});
    node::NodeOptions leech_opts;
    leech_opts.bitswap.free_rider = true;
    auto& seed = s->spawn({}, 0);
    auto& recip = s->spawn({}, 1);
    auto& leech = s->spawn(leech_opts, 2);

    Rng rng(5);
    files::RabinChunker rabin;
    const std::size_t size = 2u << 20;
    auto data = rng.bytes(size);
    auto root = seed.add(data, rabin);
    auto offer = rng.bytes(size);
    auto offer_root = recip.add(offer, rabin);

    auto& net = s->net();
    recip.start_fetch(root);
    seed.start_fetch(offer_root);
    leech.start_fetch(root);
    net.run_until([&] { return recip.has_dag(root); }, net.now() + std::chrono::hours(4));
    bool done = recip.has_dag(root);
    auto leech_bytes = leech.bitswap().stats().bytes_received;
    double share = static_cast<double>(leech_bytes) / size;
    // Every session someone holds with the leech counts.
    std::string per_peer;
    double worst = 1.0;
    int sessions = 0;
    for (auto* n : {&seed, &recip}) {
        if (!n->bitswap().session(leech.id())) continue;
        double f = n->bitswap().ignored_fraction(leech.id());
        worst = std::min(worst, f);
        per_peer += std::string(sessions++ ? ", " : "") + (n == &seed ? "seed " : "reciprocator ") + fmt(f * 100, 1) + "%";
    }
    return {done && share < 0.25 && sessions > 0 && worst >= 0.5,
            std::string("reciprocator ") + (done ? "completed" : "DID NOT complete") + " at " +
                fmt(sim_seconds(net.now()), 1) + " s simulated, leech received " + fmt(share * 100, 1) +
                "% of the file (bound 25%), time ignored: " + per_peer + " (bound 50%), " +
                fmt(seconds_since(t0), 2) + " s wall"};
}

// --- 6. deduplication ---

std::uint64_t blob_bytes(blockstore::BlockStore& store)
{
    std::uint64_t total = 0;
    for (const auto& k : store.keys()) {
        auto obj = dag::DagObject::decode(*store.get(k));
        if (files::kind_of(obj) == files::Kind::blob) total += obj.data.size() - 1;
    }
    return total;
}

Outcome dedup()
{
    Rng rng(6);
    auto first = rng.bytes(1u << 20);
    auto second = first;
    auto tail = rng.bytes(512u << 10);
    std::copy(tail.begin(), tail.end(), second.begin() + (512u << 10));

    blockstore::MemoryBlockStore store;
    files::RabinChunker rabin;
    files::add_file(first, rabin, store);
    files::add_file(second, rabin, store);
    auto unique = blob_bytes(store);
    auto blocks = store.size();
    files::add_file(first, rabin, store);
    auto added = store.size() - blocks;
    double mib = unique / double(1u << 20);
    return {mib < 1.6 && added == 0, "unique blob bytes " + fmt(mib, 3) + " MiB (bound 1.6), re-add stored " +
                                         std::to_string(added) + " new blocks"};
}

// --- 7. path equivalence ---

std::string random_name(Rng& rng)
{
    static const char* alphabet = "abcdefghijklmnopqrstuvwxyz0123456789-_.";
    std::string s;
    auto n = 1 + rng.uniform(12);
    for (std::size_t i = 0; i < n; ++i) s += alphabet[rng.uniform(39)];
    return s == "." || s == ".." ? s + "x" : s;
}

Outcome path_equivalence()
{
    Rng rng(7);
    int ok = 0;
    for (int g = 0; g < 100; ++g) {
        blockstore::MemoryBlockStore store;
        dag::DagReader reader(dag::store_getter(store));
        auto filler = [&](std::set<std::string>& taken) {
            std::vector<files::TreeEntry> out;
            for (auto n = rng.uniform(4); n > 0; --n) {
                auto name = random_name(rng);
                if (!taken.insert(name).second) continue;
                auto k = files::add_file(rng.bytes(rng.uniform(300)), files::FixedChunker(64), store);
                out.push_back(files::tree_entry(name, k, reader));
            }
            return out;
        };
        auto bar_name = random_name(rng);
        auto baz_name = random_name(rng);
        Multihash baz = rng.bernoulli(0.5)
                            ? files::add_file(rng.bytes(rng.uniform(2000)), files::FixedChunker(256), store)
                            : files::make_tree({}, store);
        std::set<std::string> in_bar{baz_name};
        auto bar_entries = filler(in_bar);
        bar_entries.push_back(files::tree_entry(baz_name, baz, reader));
        auto bar = files::make_tree(bar_entries, store);
        std::set<std::string> in_foo{bar_name};
        auto foo_entries = filler(in_foo);
        foo_entries.push_back(files::tree_entry(bar_name, bar, reader));
        auto foo = files::make_tree(foo_entries, store);

        ipns::Resolver r;
        r.reader = &reader;
        auto via_foo = r.resolve("/ipfs/" + foo.to_string() + "/" + bar_name + "/" + baz_name);
        auto via_bar = r.resolve("/ipfs/" + bar.to_string() + "/" + baz_name);
        auto direct = dag::resolve_path(foo, {bar_name, baz_name}, reader);
        if (via_foo == baz && via_bar == baz && direct == baz) ++ok;
    }
    return {ok == 100, std::to_string(ok) + "/100 graphs agree"};
}

// --- 8. flattened trees ---

Multihash random_tree(Rng& rng, blockstore::BlockStore& store, const dag::DagReader& reader, int depth,
                      std::size_t& reachable)
{
    std::vector<files::TreeEntry> entries;
    std::set<std::string> names;
    for (auto n = rng.uniform(6); n > 0; --n) {
        auto name = random_name(rng);
        if (!names.insert(name).second) continue;
        Multihash k;
        auto pick = rng.uniform(3);
        if (depth > 0 && pick == 0) {
            k = random_tree(rng, store, reader, depth - 1, reachable);
        } else {
            auto chunk = pick == 1 ? 32 : 4096;
            k = files::add_file(rng.bytes(rng.uniform(200)), files::FixedChunker(chunk), store);
        }
        entries.push_back(files::tree_entry(name, k, reader));
        ++reachable;
    }
    return files::make_tree(entries, store);
}

Outcome flattened()
{
    Rng rng(8);
    int ok = 0;
    std::size_t rows = 0;
    for (int t = 0; t < 50; ++t) {
        blockstore::MemoryBlockStore store;
        dag::DagReader reader(dag::store_getter(store));
        std::size_t expect = 0;
        auto root = random_tree(rng, store, reader, 4, expect);
        auto flat = files::flatten_tree(root, reader);
        bool good = flat.links.size() == expect;
        for (const auto& l : flat.links)
            good = good && dag::resolve_path(root, dag::split_path(l.name), reader) == l.hash;
        rows += flat.links.size();
        ok += good;
    }
    return {ok == 50, std::to_string(ok) + "/50 trees, " + std::to_string(rows) + " rows all resolve"};
}

// --- 9. IPNS authenticity and freshness ---

Outcome ipns_freshness()
{
    auto t0 = Clock::now();
    auto s = make_swarm(48, 9);
    auto& eve = s->node(0);
    Rng rng(9);
    int ok = 0;
    std::size_t injected = 0;
    for (int t = 0; t < 100; ++t) {
        auto& alice = s->node(1 + rng.uniform(s->size() - 1));
        auto& reader = s->node(1 + rng.uniform(s->size() - 1));
        auto now = s->net().now();
        auto key = ipns::name_key(alice.id());

        // Alice publishes a few versions; Eve keeps the old ones.
        std::vector<ipns::NameRecord> history;
        auto versions = 2 + rng.uniform(3);
        for (std::size_t v = 0; v < versions; ++v)
            history.push_back(ipns::publish_name(alice.identity(), Multihash::of(rng.bytes(16)), alice.dht(), now));
        const auto& latest = history.back();

        // Forged: Eve's signature over Alice's name with a higher sequence.
        auto forged = ipns::NameRecord::make(eve.identity(), Multihash::of(rng.bytes(16)), latest.sequence + 10,
                                             now + std::chrono::hours(1));
        forged.publisher = alice.id();
        eve.dht().store_record(
            routing::ValueRecord::make(eve.identity(), key, forged.encode(), latest.sequence + 10));
        // Forged: Alice's key and an altered value, signature left as it was.
        auto altered = latest;
        altered.value = Multihash::of(rng.bytes(16));
        altered.sequence += 5;
        eve.dht().store_record(
            routing::ValueRecord::make(eve.identity(), key, altered.encode(), altered.sequence));
        // Stale: an older genuine record replayed under a high routing sequence.
        const auto& old = history[rng.uniform(history.size() - 1)];
        eve.dht().store_record(routing::ValueRecord::make(eve.identity(), key, old.encode(), latest.sequence + 20));
        injected += 3;

        try {
            auto best = ipns::lookup_records(alice.id(), reader.dht(), now).front();
            if (best.value == latest.value && best.sequence == latest.sequence) ++ok;
        } catch (const Error&) {
        }
    }
    return {ok == 100, std::to_string(ok) + "/100 resolutions returned the latest signed value (" +
                           std::to_string(injected) + " forged or stale records injected), " +
                           fmt(seconds_since(t0), 2) + " s"};
}

// --- 10. tamper detection ---

Outcome tamper()
{
    auto t0 = Clock::now();
    Rng rng(10);
    int stored_ok = 0, flight_ok = 0;
    std::uint64_t credit = 0;
    node::NodeOptions opts;
    opts.strategy = std::make_shared<AlwaysSend>();
    for (int i = 0; i < 1000; ++i) {
        auto s = std::make_unique<node::Swarm>(1000 + i);
        s->net().set_classifier(node::Node::describe);
        auto& a = s->spawn(opts, 0);
        auto& b = s->spawn(opts, 1);
        auto block = rng.bytes(1 + rng.uniform(16 * 1024));
        auto key = a.store().put(block);
        bool in_flight = i % 2 == 1;
        bool detected = false;
        if (in_flight) {
            s->net().set_behavior(a.address(), netsim::Behavior::corrupt_blocks);
        } else {
            // Flip one bit of the stored copy behind the store's back.
            auto bad = block;
            bad[rng.uniform(bad.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
            static_cast<blockstore::MemoryBlockStore&>(a.store()).overwrite_raw(key, bad);
        }
        b.bitswap().connect(a.id(), a.address());
        b.bitswap().want({key});
        s->net().run_until(s->net().now() + 10s);
        auto got = b.store().has(key) ? b.store().get(key) : std::nullopt;
        credit += b.bitswap().ledger_or_zero(a.id()).bytes_recv + a.bitswap().ledger_or_zero(b.id()).bytes_sent;
        if (in_flight)
            detected = !got && b.bitswap().stats().bad_blocks >= 1;
        else
            detected = !got && !a.store().has(key) &&
                       static_cast<blockstore::MemoryBlockStore&>(a.store()).quarantined() == 1;
        (in_flight ? flight_ok : stored_ok) += detected;
    }
    return {stored_ok == 500 && flight_ok == 500 && credit == 0,
            "stored " + std::to_string(stored_ok) + "/500, in flight " + std::to_string(flight_ok) +
                "/500 detected, credit granted " + std::to_string(credit) + " bytes, " + fmt(seconds_since(t0), 2) +
                " s"};
}

// --- 11. encoding goldens and round trips ---

std::vector<std::pair<Bytes, Bytes>> vectors(const std::string& name)
{
    std::ifstream in(std::string(IPFS_VECTOR_DIR) + "/" + name);
    std::vector<std::pair<Bytes, Bytes>> rows;
    std::string line;
    while (std::getline(in, line)) {
        auto sp = line.find(' ');
        if (line.empty() || sp == std::string::npos) continue;
        rows.emplace_back(from_hex(line.substr(0, sp)), from_hex(line.substr(sp + 1)));
    }
    return rows;
}

std::string text_of(const Bytes& b) { return std::string(b.begin(), b.end()); }

Outcome encodings()
{
    std::size_t golden = 0, golden_bad = 0;
    auto check = [&](bool ok) {
        ++golden;
        golden_bad += !ok;
    };
    auto guarded = [&](const std::function<bool()>& f) {
        try {
            check(f());
        } catch (const std::exception&) {
            check(false);
        }
    };
    using multiformats::HashCode;
    for (auto [file, code] : {std::pair{"multihash_sha256.txt", HashCode::sha2_256},
                              std::pair{"multihash_sha512.txt", HashCode::sha2_512},
                              std::pair{"multihash_identity.txt", HashCode::identity}})
        for (const auto& [in, out] : vectors(file))
            guarded([&] { return Multihash::of(in, code).encode() == out && Multihash::decode(out).verify(in); });
    for (const auto& [in, out] : vectors("base58.txt"))
        guarded([&] { return multiformats::base_display(in) == text_of(out) && multiformats::base_parse(text_of(out)) == in; });
    for (const auto& [in, out] : vectors("multiaddr.txt"))
        guarded([&] {
            auto a = multiformats::Multiaddr::parse(text_of(in));
            return a.encode() == out && multiformats::Multiaddr::decode(out) == a;
        });
    for (const auto& [in, out] : vectors("objects.txt"))
        guarded([&] {
            auto obj = dag::from_json(text_of(in));
            return obj.encode() == out && dag::DagObject::decode(out) == obj;
        });
    for (const auto& [in, out] : vectors("blob_keys.txt"))
        guarded([&] { return files::make_blob(in).key().encode() == out; });
    for (const auto& [in, out] : vectors("proquint.txt"))
        guarded([&] { return ipns::proquint_encode(in) == text_of(out) && ipns::proquint_decode(text_of(out)) == in; });
    bool goldens_ok = golden_bad == 0 && golden > 0;

    // Round trips, 1000 cases each.
    Rng rng(11);
    std::size_t failures = 0;
    for (int i = 0; i < 1000; ++i) {
        auto data = rng.bytes(rng.uniform(600));
        auto mh = Multihash::of(data, i % 2 ? HashCode::sha2_512 : HashCode::sha2_256);
        failures += Multihash::decode(mh.encode()) != mh || Multihash::parse(mh.to_string()) != mh;
        failures += multiformats::base_parse(multiformats::base_display(data)) != data;
        auto even = rng.bytes(2 * rng.uniform(40));
        failures += ipns::proquint_decode(ipns::proquint_encode(even)) != even;

        dag::DagObject obj{{}, rng.bytes(rng.uniform(100))};
        for (auto n = rng.uniform(5); n > 0; --n)
            obj.links.push_back({random_name(rng), Multihash::of(rng.bytes(8)), rng.uniform(1u << 30)});
        failures += dag::DagObject::decode(obj.encode()) != obj;

        // Chunk and rejoin; a few inputs run to several MiB.
        std::size_t size = rng.uniform(1000) < 3 ? 1 + rng.uniform(8u << 20) : rng.uniform(64 * 1024);
        auto file = rng.bytes(size);
        blockstore::MemoryBlockStore store;
        dag::DagReader reader(dag::store_getter(store));
        std::unique_ptr<files::Chunker> chunker;
        if (i % 2) chunker = std::make_unique<files::RabinChunker>();
        else chunker = std::make_unique<files::FixedChunker>(1 + rng.uniform(8192));
        failures += files::cat(files::add_file(file, *chunker, store), reader) != file;
    }
    return {goldens_ok && failures == 0, std::to_string(golden - golden_bad) + "/" + std::to_string(golden) +
                                             " golden vectors match, " + std::to_string(failures) +
                                             " round-trip failures in 5 x 1000 cases"};
}

}  // namespace

int main(int argc, char** argv)
{
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
    };
    const std::vector<Criterion> all{
        {1, "sigmoid strategy", sigmoid},
        {2, "kademlia lookup cost", kademlia},
        {3, "disjoint-path resilience", disjoint_paths},
        {4, "end-to-end exchange", end_to_end},
        {5, "leech starvation", leech},
        {6, "deduplication", dedup},
        {7, "path equivalence", path_equivalence},
        {8, "flattened-tree oracle", flattened},
        {9, "ipns authenticity and freshness", ipns_freshness},
        {10, "tamper detection", tamper},
        {11, "encoding goldens", encodings},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
