#include "support.hpp"

#include <functional>

#include "ipfs/merkledag/dag.hpp"
#include "ipfs/node/node.hpp"

using namespace ipfs;
using namespace ipfs::dag;

namespace {

DagObject leaf(const std::string& data) { return DagObject{{}, to_bytes(data)}; }

// Brute-force preorder over the stored graph, for comparison.
void preorder(const Multihash& k, blockstore::BlockStore& store, std::set<Multihash>& seen,
              std::vector<Multihash>& out)
{
    auto obj = DagObject::decode(*store.get(k));
    for (const auto& l : obj.links) {
        if (!seen.insert(l.hash).second) continue;
        out.push_back(l.hash);
        preorder(l.hash, store, seen, out);
    }
}

}  // namespace

TEST_SUITE("merkledag")
{
    TEST_CASE("empty object")
    {
        DagObject empty;
        CHECK(empty.encode() == Bytes{0x00, 0x00});
        CHECK(empty.key() == DagObject{}.key());
        CHECK(DagObject::decode(empty.encode()) == empty);
    }

    TEST_CASE("one-link layout written out by hand")
    {
        auto target = Multihash::of(as_view("x"));
        DagObject obj{{DagLink{"bar", target, 5}}, to_bytes("foo")};
        Bytes expect{0x01, 0x03, 'b', 'a', 'r', 0x22};
        append(expect, target.encode());
        expect.push_back(0x05);
        append(expect, Bytes{0x03, 'f', 'o', 'o'});
        CHECK(obj.encode() == expect);
        CHECK(DagObject::decode(expect) == obj);
    }

    TEST_CASE("link order is semantic")
    {
        auto a = link_to("a", leaf("1"));
        auto b = link_to("b", leaf("2"));
        CHECK(DagObject{{a, b}, {}}.key() != DagObject{{b, a}, {}}.key());
    }

    TEST_CASE("object goldens")
    {
        auto rows = test::vectors("objects.txt");
        REQUIRE(rows.size() >= 5);
        for (const auto& [text, expected] : rows) {
            auto obj = from_json(to_string(text));
            CHECK(obj.encode() == expected);
            CHECK(DagObject::decode(expected) == obj);
            CHECK(from_json(to_json(obj)) == obj);
        }
    }

    TEST_CASE("decode errors carry offsets")
    {
        Bytes bad{0x01, 0x03, 'b', 'a'};
        try {
            DagObject::decode(bad);
            FAIL("expected an error");
        } catch (const TruncatedError&) {
        } catch (const DecodeError& e) {
            CHECK(e.offset() <= bad.size());
        }
        auto good = leaf("abc").encode();
        good.push_back(0);
        CHECK_THROWS_AS(DagObject::decode(good), DecodeError);
    }

    TEST_CASE("single bit mutations are evident")
    {
        Rng rng(1);
        blockstore::MemoryBlockStore store;
        auto child = put_object(store, leaf("child"));
        DagObject obj{{DagLink{"c", child, 7}}, rng.bytes(40)};
        auto bytes = obj.encode();
        auto key = obj.key();
        for (int i = 0; i < 1000; ++i) {
            auto mutated = bytes;
            mutated[rng.uniform(mutated.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
            bool evident = !key.verify(mutated);
            try {
                evident = evident || DagObject::decode(mutated).key() != key;
            } catch (const Error&) {
                evident = true;
            }
            REQUIRE(evident);
        }
    }

    TEST_CASE("json text form")
    {
        auto child = leaf("baz");
        DagObject obj{{link_to("baz", child)}, to_bytes("hello")};
        auto text = to_json(obj);
        CHECK(text.find("\"data\": \"hello\"") != std::string::npos);
        CHECK(text.find("\"name\": \"baz\"") != std::string::npos);
        CHECK(text.find(child.key().to_string()) != std::string::npos);
        CHECK(from_json(text) == obj);

        DagObject binary{{}, Bytes{0xff, 0x00, 0x80}};
        CHECK(to_json(binary).find("\"hex\": \"ff0080\"") != std::string::npos);
        CHECK(from_json(to_json(binary)) == binary);
        CHECK_THROWS_AS(from_json("{not json"), DecodeError);
    }

    TEST_CASE("cumulative link sizes")
    {
        blockstore::MemoryBlockStore store;
        DagReader reader(store_getter(store));
        auto baz = leaf("baz");
        put_object(store, baz);
        auto l = link_to("baz", baz);
        CHECK(l.size == baz.encode().size());
        DagObject bar{{l}, to_bytes("bar")};
        put_object(store, bar);
        auto lb = link_to("bar", bar);
        CHECK(lb.size == bar.encode().size() + l.size);
        DagObject foo{{lb}, {}};
        CHECK(verify_link_sizes(foo, reader));
        foo.links[0].size += 1;
        CHECK_FALSE(verify_link_sizes(foo, reader));
        // unknown targets are not judged
        DagObject dangling{{DagLink{"x", Multihash::of(as_view("nowhere")), 12345}}, {}};
        CHECK(verify_link_sizes(dangling, reader));
    }

    TEST_CASE("path resolution")
    {
        blockstore::MemoryBlockStore store;
        DagReader reader(store_getter(store));
        auto baz = leaf("baz");
        auto kbaz = put_object(store, baz);
        DagObject bar{{link_to("baz", baz)}, {}};
        auto kbar = put_object(store, bar);
        DagObject foo{{link_to("bar", bar)}, {}};
        auto kfoo = put_object(store, foo);

        CHECK(resolve_path(kfoo, {}, reader) == kfoo);
        CHECK(resolve_path(kfoo, {"bar", "baz"}, reader) == kbaz);
        CHECK(resolve_path(kbar, {"baz"}, reader) == kbaz);
        try {
            resolve_path(kfoo, {"nonexistent"}, reader);
            FAIL("expected PathNotFound");
        } catch (const PathNotFound& e) {
            CHECK(e.index() == 0);
        }
        try {
            resolve_path(kfoo, {"bar", "nope"}, reader);
            FAIL("expected PathNotFound");
        } catch (const PathNotFound& e) {
            CHECK(e.index() == 1);
        }
        CHECK(split_path("a/b//c/") == std::vector<std::string>{"a", "b", "c"});

        // duplicate names: first match wins
        DagObject dup{{link_to("x", leaf("first")), link_to("x", leaf("second"))}, {}};
        put_object(store, leaf("first"));
        put_object(store, leaf("second"));
        CHECK(resolve_path(put_object(store, dup), {"x"}, reader) == leaf("first").key());

        blockstore::MemoryBlockStore empty;
        DagReader nothing(store_getter(empty));
        CHECK_THROWS_AS(resolve_path(kfoo, {"bar"}, nothing), FetchError);
    }

    TEST_CASE("ls rows")
    {
        blockstore::MemoryBlockStore store;
        DagReader reader(store_getter(store));
        DagObject obj{{link_to("a", leaf("1")), link_to("b", leaf("22"))}, {}};
        auto rows = list_links(put_object(store, obj), reader);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].name == "a");
        CHECK(rows[1].hash == leaf("22").key());
    }

    TEST_CASE("refs")
    {
        blockstore::MemoryBlockStore store;
        DagReader reader(store_getter(store));
        auto k = put_object(store, leaf("lonely"));
        CHECK(refs_recursive(k, reader).empty());

        // diamond
        auto c = leaf("C");
        put_object(store, c);
        DagObject a{{link_to("c", c)}, to_bytes("A")};
        DagObject b{{link_to("c", c)}, to_bytes("B")};
        put_object(store, a);
        put_object(store, b);
        DagObject root{{link_to("a", a), link_to("b", b)}, {}};
        auto refs = refs_recursive(put_object(store, root), reader);
        CHECK(refs == std::vector<Multihash>{a.key(), c.key(), b.key()});

        // 3-level binary tree: 6 refs in preorder
        std::function<DagObject(int, std::string)> build = [&](int depth, std::string name) {
            DagObject o{{}, to_bytes(name)};
            if (depth > 0) {
                auto l = build(depth - 1, name + "l");
                auto r = build(depth - 1, name + "r");
                o.links = {link_to("l", l), link_to("r", r)};
            }
            put_object(store, o);
            return o;
        };
        auto top = build(2, "t");
        auto got = refs_recursive(top.key(), reader);
        std::set<Multihash> seen;
        std::vector<Multihash> oracle;
        preorder(top.key(), store, seen, oracle);
        CHECK(got.size() == 6);
        CHECK(got == oracle);

        // missing child: partial results travel with the error
        blockstore::MemoryBlockStore partial;
        DagReader preader(store_getter(partial));
        put_object(partial, a);
        auto proot = put_object(partial, root);
        try {
            refs_recursive(proot, preader);
            FAIL("expected FetchError");
        } catch (const FetchError& e) {
            CHECK(e.key() == c.key());
            CHECK(e.partial() == std::vector<Multihash>{a.key(), c.key()});  // c is named, just not readable
        }
    }

    TEST_CASE("storing a graph twice adds nothing")
    {
        blockstore::MemoryBlockStore store;
        DagObject bar{{link_to("baz", leaf("baz"))}, {}};
        put_object(store, leaf("baz"));
        put_object(store, bar);
        auto n = store.size();
        put_object(store, leaf("baz"));
        put_object(store, bar);
        CHECK(store.size() == n);
    }

    TEST_CASE("publish")
    {
        node::Swarm swarm(3);
        swarm.spawn_all({16, 4, {}});
        auto& a = swarm.node(2);
        auto obj = leaf("published");
        auto key = publish(obj, a.store(), a.dht());
        CHECK(key == obj.key());
        CHECK_NOTHROW(publish(obj, a.store(), a.dht()));
        auto found = swarm.node(9).dht().find_value_peers(key, 1);
        REQUIRE(!found.providers.empty());
        CHECK(found.providers[0].id == a.id());
        CHECK(a.dht().provider_records(key) <= 1);

        auto changed = leaf("published!");
        auto key2 = publish(changed, a.store(), a.dht());
        CHECK(key2 != key);
        CHECK(a.store().get(key) == obj.encode());

        struct Broken : routing::Routing {
            identity::NodeId id;
            const identity::NodeId& self() const override { return id; }
            std::optional<routing::Multiaddr> find_peer(const identity::NodeId&) override { return std::nullopt; }
            std::size_t set_value(ByteView, ByteView, std::uint64_t) override { return 0; }
            std::vector<routing::ValueRecord> get_values(ByteView) override { return {}; }
            void provide(const Multihash&) override { throw routing::RoutingError("offline"); }
            routing::ProviderResult find_value_peers(const Multihash&, std::size_t) override { return {}; }
        } broken;
        blockstore::MemoryBlockStore store;
        CHECK_THROWS_AS(publish(leaf("x"), store, broken), PublishError);
        CHECK(store.has(leaf("x").key()));
    }

    TEST_CASE("signed objects")
    {
        Rng rng(4);
        auto id = identity::NodeIdentity::generate(0, rng);
        auto other = identity::NodeIdentity::generate(0, rng);
        blockstore::MemoryBlockStore store;
        DagReader reader(store_getter(store));
        auto obj = leaf("signed content");
        auto so = sign_object(obj, id, store);
        CHECK(reader.verify_signed(so) == obj);
        auto key = store.put(so.encode());
        CHECK(frame_kind(*store.get(key)) == FrameKind::signed_object);
        CHECK(reader.object(key) == obj);

        auto tampered = so;
        tampered.object[tampered.object.size() - 1] ^= 1;
        CHECK_THROWS_AS(reader.verify_signed(tampered), SignatureError);

        auto wrong_key = so;
        sign_object(obj, other, store);
        wrong_key.public_key = Multihash::of(other.public_key());
        CHECK_THROWS_AS(reader.verify_signed(wrong_key), SignatureError);
        auto unknown_key = so;
        unknown_key.public_key = Multihash::of(as_view("not stored"));
        CHECK_THROWS_AS(reader.verify_signed(unknown_key), KeyNotFound);
    }

    TEST_CASE("encrypted objects")
    {
        auto k1 = make_key(as_view("key one"));
        auto k2 = make_key(as_view("key two"));
        CHECK(k1.size() == kKeyBytes);
        blockstore::MemoryBlockStore store;

        auto child = leaf("secret child");
        auto enc_child = encrypt_object(child, k2, to_bytes("t2"));
        auto kchild = store.put(enc_child.encode());
        DagObject parent{{DagLink{"child", kchild, enc_child.encode().size()}}, to_bytes("parent")};
        auto enc_parent = encrypt_object(parent, k1, to_bytes("t1"));
        auto kparent = store.put(enc_parent.encode());

        // links are inside the ciphertext
        auto raw = enc_parent.encode();
        auto name = to_bytes("child");
        CHECK(std::search(raw.begin(), raw.end(), name.begin(), name.end()) == raw.end());

        DagReader none(store_getter(store));
        CHECK_THROWS_AS(none.object(kparent), NoKey);
        CHECK_THROWS_AS(resolve_path(kparent, {"child"}, none), NoKey);

        DagReader only_k1(store_getter(store), Keychain{{to_bytes("t1"), k1}});
        CHECK(only_k1.object(kparent) == parent);
        CHECK(resolve_path(kparent, {"child"}, only_k1) == kchild);
        CHECK_THROWS_AS(only_k1.object(kchild), NoKey);

        Keychain both{{to_bytes("t1"), k1}, {to_bytes("t2"), k2}};
        CHECK(decrypt_object(enc_child, both) == child);
        auto bad = enc_child;
        bad.ciphertext.back() ^= 1;
        CHECK_THROWS_AS(decrypt_object(bad, both), DecryptError);
        Keychain wrong{{to_bytes("t2"), k1}};
        CHECK_THROWS_AS(decrypt_object(enc_child, wrong), DecryptError);
    }

    TEST_CASE("link resolver for pinning")
    {
        blockstore::MemoryBlockStore store;
        DagReader reader(store_getter(store));
        DagObject bar{{link_to("baz", leaf("baz"))}, {}};
        put_object(store, leaf("baz"));
        auto k = put_object(store, bar);
        auto resolver = link_resolver(reader);
        CHECK(resolver(k) == std::vector<Multihash>{leaf("baz").key()});
        CHECK_FALSE(resolver(Multihash::of(as_view("absent"))).has_value());
        auto raw = store.put(Bytes{0xff, 0xff, 0xff});
        CHECK(resolver(raw) == std::vector<Multihash>{});
        CHECK(store.pin(k, true, resolver).size() == 2);
    }
}
