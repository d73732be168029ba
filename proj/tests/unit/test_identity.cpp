#include "support.hpp"

#include <sodium.h>

#include "ipfs/identity/identity.hpp"

using namespace ipfs;
using namespace ipfs::identity;

namespace {

// Recount by hand: H(H(pk)) with libsodium's SHA-256 directly.
Bytes double_sha(const Bytes& pk)
{
    Bytes inner(32), outer(32);
    crypto_hash_sha256(inner.data(), pk.data(), pk.size());
    crypto_hash_sha256(outer.data(), inner.data(), inner.size());
    return outer;
}

int zero_bits(const Bytes& d)
{
    int n = 0;
    for (auto b : d) {
        if (b == 0) {
            n += 8;
            continue;
        }
        for (int bit = 7; bit >= 0 && !(b >> bit & 1); --bit) ++n;
        break;
    }
    return n;
}

}  // namespace

TEST_SUITE("identity")
{
    TEST_CASE("node id is the double hash of the public key")
    {
        Rng rng(1);
        auto id = NodeIdentity::generate(0, rng);
        CHECK(id.public_key().size() == kPublicKeyBytes);
        CHECK(id.node_id().code() == 0x12);
        CHECK(id.node_id().digest() == double_sha(id.public_key()));
        CHECK(derive_node_id(id.public_key()) == id.node_id());
    }

    TEST_CASE("puzzle difficulty")
    {
        Rng rng(8);
        auto id = NodeIdentity::generate(8, rng);
        CHECK(zero_bits(id.node_id().digest()) >= 8);
        CHECK(id.node_id().digest()[0] == 0);
        CHECK(leading_zero_bits(id.node_id().digest()) == zero_bits(id.node_id().digest()));
        CHECK(verify_peer(id.node_id(), id.public_key(), 8));
        // monotone: valid at every lower difficulty
        for (int d = 0; d < 8; ++d) CHECK(verify_peer(id.node_id(), id.public_key(), d));

        CHECK_THROWS_AS(NodeIdentity::generate(30, rng), DifficultyTooHigh);
    }

    TEST_CASE("verify_peer rejects a weak id at higher difficulty")
    {
        Rng rng(3);
        for (int i = 0; i < 100; ++i) {
            auto id = NodeIdentity::generate(0, rng);
            if (zero_bits(id.node_id().digest()) >= 8) continue;
            CHECK(verify_peer(id.node_id(), id.public_key(), 0));
            CHECK_FALSE(verify_peer(id.node_id(), id.public_key(), 8));
            return;
        }
        FAIL("no weak identity generated");
    }

    TEST_CASE("verify_peer rejects a foreign key")
    {
        Rng rng(4);
        auto a = NodeIdentity::generate(0, rng);
        auto b = NodeIdentity::generate(0, rng);
        CHECK(verify_peer(a.node_id(), a.public_key(), 0));
        CHECK_FALSE(verify_peer(a.node_id(), b.public_key(), 0));
    }

    TEST_CASE("generation is deterministic under a seed")
    {
        Rng r1(99), r2(99);
        auto a = NodeIdentity::generate(4, r1);
        auto b = NodeIdentity::generate(4, r2);
        CHECK(a.node_id() == b.node_id());
        CHECK(a.private_key() == b.private_key());
    }

    TEST_CASE("signatures")
    {
        Rng rng(5);
        auto a = NodeIdentity::generate(0, rng);
        auto b = NodeIdentity::generate(0, rng);
        auto msg = to_bytes("Signed by her private key");
        auto sig = a.sign(msg);
        CHECK(sig.signer == a.node_id());
        CHECK(sig.payload_hash == Multihash::of(msg));
        CHECK(verify_sig(a.public_key(), msg, sig));
        CHECK(Signature::decode(sig.encode()) == sig);
        CHECK(a.sign(msg) == sig);  // deterministic

        auto flipped = msg;
        flipped[0] ^= 1;
        CHECK_FALSE(verify_sig(a.public_key(), flipped, sig));
        CHECK_FALSE(verify_sig(b.public_key(), msg, sig));
        CHECK_THROWS_AS(verify_sig(Bytes(5, 1), msg, sig), KeyError);
    }

    TEST_CASE("signature soundness over random bit flips")
    {
        Rng rng(6);
        auto id = NodeIdentity::generate(0, rng);
        int false_accepts = 0;
        for (int i = 0; i < 1000; ++i) {
            auto msg = rng.bytes(1 + rng.uniform(200));
            auto sig = id.sign_raw(msg);
            REQUIRE(verify_raw(id.public_key(), msg, sig));
            if (rng.bernoulli(0.5)) {
                msg[rng.uniform(msg.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
            } else {
                sig[rng.uniform(sig.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
            }
            if (verify_raw(id.public_key(), msg, sig)) ++false_accepts;
        }
        CHECK(false_accepts == 0);
    }

    TEST_CASE("identity file")
    {
        Rng rng(7);
        auto id = NodeIdentity::generate(2, rng);
        for (std::string pass : {"", "correct horse"}) {
            auto file = id.save(pass, rng);
            CHECK(file[0] == 1);
            auto back = NodeIdentity::load(file, pass);
            CHECK(back.node_id() == id.node_id());
            CHECK(back.private_key() == id.private_key());
            CHECK(back.sign(as_view("x")) == id.sign(as_view("x")));
        }
        auto locked = id.save("secret", rng);
        CHECK_THROWS(NodeIdentity::load(locked, "wrong"));
        // the private key is not stored in the clear under a passphrase
        auto pk = id.private_key();
        CHECK(std::search(locked.begin(), locked.end(), pk.begin(), pk.end()) == locked.end());
    }
}
