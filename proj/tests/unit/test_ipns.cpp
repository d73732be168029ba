#include "support.hpp"

#include <deque>

#include "ipfs/files/files.hpp"
#include "ipfs/ipns/ipns.hpp"

using namespace ipfs;
using namespace ipfs::ipns;
using routing::MemoryRouting;
using routing::MemoryRoutingHub;
using routing::Multiaddr;

namespace {

struct Peer {
    NodeIdentity id;
    std::unique_ptr<MemoryRouting> routing;
};

// Several identities sharing one hub and one block store.
struct World {
    Rng rng{21};
    std::shared_ptr<MemoryRoutingHub> hub = std::make_shared<MemoryRoutingHub>();
    blockstore::MemoryBlockStore store;
    dag::DagReader reader{dag::store_getter(store)};
    std::deque<Peer> peers;  // references stay valid across spawn()
    FixtureDns dns;

    Peer& spawn()
    {
        auto id = NodeIdentity::generate(0, rng);
        auto r = std::make_unique<MemoryRouting>(hub, id, Multiaddr::sim(peers.size() + 1));
        peers.push_back(Peer{std::move(id), std::move(r)});
        return peers.back();
    }

    Resolver resolver(Peer& p, SimTime now = SimTime{0})
    {
        Resolver r;
        r.routing = p.routing.get();
        r.reader = &reader;
        r.dns = &dns;
        r.now = now;
        return r;
    }

    Multihash blob(const std::string& text) { return dag::put_object(store, files::make_blob(to_bytes(text))); }
};

}  // namespace

TEST_SUITE("ipns")
{
    TEST_CASE("name record round trip and size")
    {
        Rng rng(1);
        auto id = NodeIdentity::generate(0, rng);
        auto rec = NameRecord::make(id, Multihash::of(as_view("v")), 7, SimTime(123456));
        CHECK(rec.verify());
        auto raw = rec.encode();
        CHECK(raw.size() <= 1024);
        auto back = NameRecord::decode(raw);
        CHECK(back == rec);
        CHECK(back.verify());

        auto trailing = raw;
        trailing.push_back(0);
        CHECK_THROWS_AS(NameRecord::decode(trailing), DecodeError);
        CHECK_THROWS_AS(NameRecord::decode(Bytes{0x02}), DecodeError);
    }

    TEST_CASE("tampered and foreign records do not verify")
    {
        Rng rng(2);
        auto alice = NodeIdentity::generate(0, rng);
        auto eve = NodeIdentity::generate(0, rng);
        auto rec = NameRecord::make(alice, Multihash::of(as_view("v")), 1, SimTime(1000));

        auto moved = rec;
        moved.value = Multihash::of(as_view("elsewhere"));
        CHECK_FALSE(moved.verify());
        auto bumped = rec;
        bumped.sequence = 2;
        CHECK_FALSE(bumped.verify());
        auto extended = rec;
        extended.expires = SimTime(2000);
        CHECK_FALSE(extended.verify());

        // Eve signs for Alice's name with her own key.
        auto forged = NameRecord::make(eve, rec.value, 9, SimTime(1000));
        forged.publisher = alice.node_id();
        CHECK_FALSE(forged.verify());
        forged.public_key = alice.public_key();
        CHECK_FALSE(forged.verify());
    }

    TEST_CASE("lookups keep the newest valid record")
    {
        World w;
        auto& alice = w.spawn();
        auto& eve = w.spawn();
        auto v3 = w.blob("three");
        auto v5 = w.blob("five");
        auto r3 = NameRecord::make(alice.id, v3, 3, SimTime(std::chrono::hours(1)));
        auto r5 = NameRecord::make(alice.id, v5, 5, SimTime(std::chrono::hours(1)));
        alice.routing->set_value(name_key(alice.id.node_id()), r5.encode(), 5);
        alice.routing->set_value(name_key(alice.id.node_id()), r3.encode(), 3);  // stale, refused
        CHECK(w.resolver(eve).resolve_name(alice.id.node_id()) == v5);

        // A forged record stored by Eve sits beside Alice's and loses.
        auto forged = NameRecord::make(eve.id, v3, 99, SimTime(std::chrono::hours(1)));
        forged.publisher = alice.id.node_id();
        eve.routing->set_value(name_key(alice.id.node_id()), forged.encode(), 99);
        CHECK(w.resolver(eve).resolve_name(alice.id.node_id()) == v5);

        // Past expiry nothing current remains.
        CHECK_THROWS_AS(w.resolver(eve, std::chrono::hours(2)).resolve_name(alice.id.node_id()), NameAuthError);
    }

    TEST_CASE("only forgeries means an auth failure, nothing means not found")
    {
        World w;
        auto& alice = w.spawn();
        auto& eve = w.spawn();
        CHECK_THROWS_AS(w.resolver(eve).resolve_name(alice.id.node_id()), NameNotFound);
        auto forged = NameRecord::make(eve.id, w.blob("x"), 1, SimTime(std::chrono::hours(1)));
        forged.publisher = alice.id.node_id();
        eve.routing->set_value(name_key(alice.id.node_id()), forged.encode(), 1);
        CHECK_THROWS_AS(w.resolver(eve).resolve_name(alice.id.node_id()), NameAuthError);

        eve.routing->set_value(name_key(alice.id.node_id()), to_bytes("garbage"), 2);
        CHECK_THROWS_AS(w.resolver(eve).resolve_name(alice.id.node_id()), NameAuthError);
    }

    TEST_CASE("publish bumps the sequence and expires")
    {
        World w;
        auto& alice = w.spawn();
        auto a = w.blob("a");
        auto b = w.blob("b");
        auto first = publish_name(alice.id, a, *alice.routing, SimTime(0), std::chrono::hours(1));
        auto second = publish_name(alice.id, b, *alice.routing, SimTime(0), std::chrono::hours(1));
        CHECK(first.sequence == 1);
        CHECK(second.sequence == 2);
        CHECK(w.resolver(alice).resolve_name(alice.id.node_id()) == b);
        CHECK(w.resolver(alice, std::chrono::minutes(59)).resolve_name(alice.id.node_id()) == b);
        CHECK_THROWS_AS(w.resolver(alice, std::chrono::hours(1)).resolve_name(alice.id.node_id()), NameNotFound);
    }

    TEST_CASE("proquint vectors")
    {
        for (const auto& [raw, text] : test::vectors("proquint.txt")) {
            std::string s(text.begin(), text.end());
            CHECK(proquint_encode(raw) == s);
            CHECK(proquint_decode(s) == raw);
        }
        CHECK(proquint_encode(from_hex("7f000001")) == "lusab-babad");
        CHECK(proquint_decode("dahih-dolij-sozuk-vosah-luvar-fuluh") == from_hex("111419d5cbf6eb047f8b2df4"));
        CHECK(looks_like_proquint("dahih-dolij"));
        CHECK_FALSE(looks_like_proquint("dahih-"));
        CHECK_FALSE(looks_like_proquint("fs.example.org"));
        CHECK_THROWS_AS(proquint_encode(Bytes{1, 2, 3}), LengthError);
        CHECK_THROWS_AS(proquint_decode("lusab-bab"), LengthError);
        CHECK_THROWS_AS(proquint_decode("lusab-aabad"), AlphabetError);
        CHECK_THROWS_AS(proquint_decode("luxab"), AlphabetError);
    }

    TEST_CASE("proquint round trips, 1000 cases")
    {
        Rng rng(8);
        for (int i = 0; i < 1000; ++i) {
            auto raw = rng.bytes(2 * rng.uniform(40));
            REQUIRE(proquint_decode(proquint_encode(raw)) == raw);
        }
    }

    TEST_CASE("name paths")
    {
        auto p = NamePath::parse("/ipns/fs.example.org/docs/a.txt");
        CHECK(p.space == NamePath::Space::ipns);
        CHECK(p.head == "fs.example.org");
        CHECK(p.rest == std::vector<std::string>{"docs", "a.txt"});
        CHECK(p.to_string() == "/ipns/fs.example.org/docs/a.txt");
        auto bare = NamePath::parse("QmHash/x");
        CHECK(bare.space == NamePath::Space::ipfs);
        CHECK(bare.head == "QmHash");
        CHECK(NamePath::parse("/ipfs/QmHash//x/") == NamePath::parse("/ipfs/QmHash/x"));
        CHECK_THROWS_AS(NamePath::parse(""), PathSyntaxError);
        CHECK_THROWS_AS(NamePath::parse("/ipns"), PathSyntaxError);
        CHECK(is_domain("fs.example.org"));
        CHECK_FALSE(is_domain("QmHash"));
    }

    TEST_CASE("resolution through names, paths and DNS")
    {
        World w;
        auto& alice = w.spawn();
        auto doc = w.blob("hello");
        auto docs = files::make_tree({files::tree_entry("a.txt", doc, w.reader)}, w.store);
        auto root = files::make_tree({files::tree_entry("docs", docs, w.reader)}, w.store);
        publish_name(alice.id, root, *alice.routing);
        auto r = w.resolver(alice);
        auto name = alice.id.node_id().to_string();

        CHECK(r.resolve("/ipfs/" + root.to_string() + "/docs/a.txt") == doc);
        CHECK(r.resolve("/ipns/" + name) == root);
        CHECK(r.resolve("/ipns/" + name + "/docs") == docs);
        CHECK(r.resolve("/ipns/" + name + "/docs/a.txt") == doc);
        CHECK_THROWS_AS(r.resolve("/ipns/" + name + "/nope"), dag::PathNotFound);
        CHECK_THROWS_AS(r.resolve("/ipfs/not-a-hash!"), PathSyntaxError);

        w.dns = FixtureDns::parse("# fixture\nfs.example.org\t\"ipfs=" + name + "\"\n" +
                                  "docs.example.org\tdnslink=/ipns/fs.example.org/docs\n" +
                                  "docs.example.org\tipns=/ipns/fs.example.org/docs\n" +
                                  "obj.example.org\tipfs=" + doc.to_string() + "\n" +
                                  "loop.example.org\tipns=/ipns/loop.example.org\n");
        CHECK(r.resolve("/ipns/fs.example.org") == root);
        CHECK(r.resolve("/ipns/FS.example.org./docs/a.txt") == doc);
        CHECK(r.resolve("/ipns/docs.example.org/a.txt") == doc);
        CHECK(r.resolve("/ipns/obj.example.org") == doc);
        CHECK_THROWS_AS(r.resolve("/ipns/loop.example.org"), RecursionLimit);
        CHECK_THROWS_AS(r.resolve("/ipns/missing.example.org"), NameNotFound);

        // A proquint spelling of the NodeId digest names the same node.
        auto phrase = proquint_encode(alice.id.node_id().digest());
        CHECK(r.resolve("/ipns/" + phrase + "/docs/a.txt") == doc);
        CHECK_THROWS_AS(r.resolve("/ipns/dahih-dolij-sozuk-vosah-luvar-fuluh"), LengthError);
    }

    TEST_CASE("peer links chain namespaces")
    {
        World w;
        auto& alice = w.spawn();
        auto& bob = w.spawn();
        auto& eve = w.spawn();
        auto music = w.blob("bob's music");
        auto bob_root = files::make_tree({files::tree_entry("music", music, w.reader)}, w.store);
        publish_name(bob.id, bob_root, *bob.routing);

        peer_link(alice.id, {"friends", "bob"}, bob.id.node_id(), w.store, w.resolver(alice));
        auto r = w.resolver(eve);
        auto alice_name = "/ipns/" + alice.id.node_id().to_string();
        CHECK(r.resolve(alice_name + "/friends/bob") == bob_root);
        CHECK(r.resolve(alice_name + "/friends/bob/music") == music);

        peer_link(eve.id, {"alice"}, alice.id.node_id(), w.store, w.resolver(eve));
        CHECK(r.resolve("/ipns/" + eve.id.node_id().to_string() + "/alice/friends/bob/music") == music);

        CHECK_THROWS_AS(peer_link(alice.id, {"friends", "bob"}, eve.id.node_id(), w.store, w.resolver(alice)),
                        NameError);

        // A link to a node that never published.
        Rng rng(99);
        auto ghost = NodeIdentity::generate(0, rng);
        peer_link(alice.id, {"ghost"}, ghost.node_id(), w.store, w.resolver(alice));
        CHECK_THROWS_AS(r.resolve(alice_name + "/ghost/x"), NameNotFound);
        CHECK(r.resolve(alice_name + "/friends/bob/music") == music);
    }

    TEST_CASE("publishing with history chains commits")
    {
        World w;
        auto& alice = w.spawn();
        auto v1 = files::make_tree({files::tree_entry("f", w.blob("1"), w.reader)}, w.store);
        auto v2 = files::make_tree({files::tree_entry("f", w.blob("2"), w.reader)}, w.store);
        auto rec1 = publish_with_history(alice.id, v1, w.store, w.resolver(alice), "one", "2014-09-20 12:44:06Z");
        auto rec2 = publish_with_history(alice.id, v2, w.store, w.resolver(alice), "two", "2014-09-21 12:44:06Z");
        CHECK(rec2.sequence == rec1.sequence + 1);
        auto history = files::log(rec2.value, w.reader);
        CHECK(history.commits == std::vector<Multihash>{rec2.value, rec1.value});
        // Paths go through the commit into its snapshot.
        auto r = w.resolver(alice);
        CHECK(files::cat(r.resolve("/ipns/" + alice.id.node_id().to_string() + "/f"), w.reader) == to_bytes("2"));
    }
}
