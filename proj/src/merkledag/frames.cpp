#include <sodium.h>

#include "ipfs/common/wire.hpp"
#include "ipfs/merkledag/dag.hpp"

namespace ipfs::dag {

namespace {

// 0x80 0x00 is a two-byte encoding of zero; canonical objects always use the
// minimal one-byte form, so no object begins this way.
constexpr std::uint8_t kFrameMarker[] = {0x80, 0x00};
constexpr std::uint8_t kSignedKind = 0x01;
constexpr std::uint8_t kEncryptedKind = 0x02;

Bytes signing_payload(ByteView object)
{
    Writer w;
    w.string("ipfs-signed-object").length_prefixed(object);
    return std::move(w).bytes();
}

Reader frame_body(ByteView raw, std::uint8_t kind)
{
    Reader r(raw);
    if (r.byte() != kFrameMarker[0] || r.byte() != kFrameMarker[1]) r.fail("not an object frame");
    if (r.byte() != kind) r.fail("unexpected frame kind");
    return r;
}

}  // namespace

FrameKind frame_kind(ByteView raw)
{
    if (raw.size() >= 3 && raw[0] == kFrameMarker[0] && raw[1] == kFrameMarker[1]) {
        if (raw[2] == kSignedKind) return FrameKind::signed_object;
        if (raw[2] == kEncryptedKind) return FrameKind::encrypted_object;
    }
    return FrameKind::plain;
}

Bytes SignedObject::encode() const
{
    Writer w;
    w.raw(ByteView(kFrameMarker, 2)).byte(kSignedKind);
    w.length_prefixed(object).length_prefixed(signature).length_prefixed(public_key.encode());
    return std::move(w).bytes();
}

SignedObject decode_signed(ByteView raw)
{
    auto r = frame_body(raw, kSignedKind);
    SignedObject s;
    auto obj = r.length_prefixed();
    s.object.assign(obj.begin(), obj.end());
    auto sig = r.length_prefixed();
    s.signature.assign(sig.begin(), sig.end());
    s.public_key = Multihash::decode(r.length_prefixed());
    r.expect_done("signed object");
    return s;
}

Bytes EncryptedObject::encode() const
{
    Writer w;
    w.raw(ByteView(kFrameMarker, 2)).byte(kEncryptedKind).length_prefixed(tag).length_prefixed(ciphertext);
    return std::move(w).bytes();
}

EncryptedObject decode_encrypted(ByteView raw)
{
    auto r = frame_body(raw, kEncryptedKind);
    EncryptedObject e;
    auto tag = r.length_prefixed();
    e.tag.assign(tag.begin(), tag.end());
    auto ct = r.length_prefixed();
    e.ciphertext.assign(ct.begin(), ct.end());
    r.expect_done("encrypted object");
    return e;
}

SignedObject sign_object(const DagObject& obj, const identity::NodeIdentity& signer, blockstore::BlockStore& store)
{
    SignedObject s;
    s.object = obj.encode();
    s.signature = signer.sign_raw(signing_payload(s.object));
    s.public_key = store.put(signer.public_key());
    return s;
}

DagObject DagReader::verify_signed(const SignedObject& signed_obj) const
{
    auto pk = block(signed_obj.public_key);
    if (!pk || !signed_obj.public_key.verify(*pk))
        throw KeyNotFound("public key " + signed_obj.public_key.to_string() + " is not available");
    bool ok = false;
    try {
        ok = identity::verify_raw(*pk, signing_payload(signed_obj.object), signed_obj.signature);
    } catch (const identity::KeyError&) {
        ok = false;
    }
    if (!ok) throw SignatureError("signature does not verify against " + signed_obj.public_key.to_string());
    return DagObject::decode(signed_obj.object);
}

Bytes make_key(ByteView seed)
{
    Bytes key(kKeyBytes);
    crypto_generichash(key.data(), key.size(), seed.data(), seed.size(), nullptr, 0);
    return key;
}

EncryptedObject encrypt_object(const DagObject& obj, ByteView key, ByteView tag)
{
    if (key.size() != kKeyBytes) throw std::invalid_argument("encryption key must be 32 bytes");
    auto plain = obj.encode();
    // Nonce derived from key and plaintext: equal objects encrypt equally
    // under one key, so encrypted blocks still deduplicate.
    std::uint8_t nonce[crypto_aead_xchacha20poly1305_ietf_NPUBBYTES];
    crypto_generichash(nonce, sizeof nonce, plain.data(), plain.size(), key.data(), key.size());
    EncryptedObject e;
    e.tag.assign(tag.begin(), tag.end());
    e.ciphertext.resize(sizeof nonce + plain.size() + crypto_aead_xchacha20poly1305_ietf_ABYTES);
    std::copy(nonce, nonce + sizeof nonce, e.ciphertext.begin());
    unsigned long long written = 0;
    crypto_aead_xchacha20poly1305_ietf_encrypt(e.ciphertext.data() + sizeof nonce, &written, plain.data(),
                                               plain.size(), e.tag.data(), e.tag.size(), nullptr, nonce, key.data());
    e.ciphertext.resize(sizeof nonce + written);
    return e;
}

DagObject decrypt_object(const EncryptedObject& enc, const Keychain& keychain)
{
    auto it = keychain.find(enc.tag);
    if (it == keychain.end()) throw NoKey("no key for tag " + to_hex(enc.tag));
    const auto& key = it->second;
    constexpr auto nonce_len = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
    constexpr auto mac_len = crypto_aead_xchacha20poly1305_ietf_ABYTES;
    if (key.size() != kKeyBytes || enc.ciphertext.size() < nonce_len + mac_len)
        throw DecryptError("malformed ciphertext or key");
    Bytes plain(enc.ciphertext.size() - nonce_len - mac_len);
    unsigned long long written = 0;
    if (crypto_aead_xchacha20poly1305_ietf_decrypt(plain.data(), &written, nullptr, enc.ciphertext.data() + nonce_len,
                                                   enc.ciphertext.size() - nonce_len, enc.tag.data(), enc.tag.size(),
                                                   enc.ciphertext.data(), key.data()) != 0)
        throw DecryptError("authentication failed");
    plain.resize(written);
    try {
        return DagObject::decode(plain);
    } catch (const DecodeError& e) {
        throw DecryptError(std::string("decrypted bytes are not an object: ") + e.what());
    }
}

}  // namespace ipfs::dag
