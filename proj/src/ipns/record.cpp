#include "ipfs/common/wire.hpp"
#include "ipfs/ipns/ipns.hpp"

namespace ipfs::ipns {

namespace {

constexpr std::uint8_t kRecordVersion = 0x01;

}  // namespace

NameRecord NameRecord::make(const NodeIdentity& publisher, const Multihash& value, std::uint64_t sequence,
                            SimTime expires)
{
    NameRecord r;
    r.publisher = publisher.node_id();
    r.value = value;
    r.sequence = sequence;
    r.expires = expires;
    r.public_key = publisher.public_key();
    r.signature = publisher.sign_raw(r.signing_payload());
    return r;
}

Bytes NameRecord::signing_payload() const
{
    Writer w;
    w.string(std::string_view("ipns-record\0", 12));
    w.length_prefixed(publisher.encode()).length_prefixed(value.encode());
    w.uvarint(sequence).uvarint(static_cast<std::uint64_t>(expires.count()));
    return std::move(w).bytes();
}

bool NameRecord::verify() const
{
    try {
        if (identity::derive_node_id(public_key) != publisher) return false;
        return identity::verify_raw(public_key, signing_payload(), signature);
    } catch (const Error&) {
        return false;
    }
}

Bytes NameRecord::encode() const
{
    Writer w;
    w.byte(kRecordVersion).length_prefixed(publisher.encode()).length_prefixed(value.encode());
    w.uvarint(sequence).uvarint(static_cast<std::uint64_t>(expires.count()));
    w.length_prefixed(public_key).length_prefixed(signature);
    auto out = std::move(w).bytes();
    if (out.size() > routing::kMaxValueBytes)
        throw RecordTooLarge("name record of " + std::to_string(out.size()) + " bytes exceeds the routing value limit");
    return out;
}

NameRecord NameRecord::decode(ByteView raw)
{
    Reader r(raw);
    if (r.byte() != kRecordVersion) r.fail("unknown name record version");
    NameRecord rec;
    rec.publisher = Multihash::decode(r.length_prefixed());
    rec.value = Multihash::decode(r.length_prefixed());
    rec.sequence = r.uvarint();
    auto expires = r.uvarint();
    if (expires > static_cast<std::uint64_t>(INT64_MAX)) r.fail("expiry out of range");
    rec.expires = SimTime(static_cast<std::int64_t>(expires));
    auto pk = r.length_prefixed();
    rec.public_key.assign(pk.begin(), pk.end());
    auto sig = r.length_prefixed();
    rec.signature.assign(sig.begin(), sig.end());
    r.expect_done("name record");
    return rec;
}

Bytes name_key(const NodeId& publisher) { return publisher.encode(); }

NamePath NamePath::parse(std::string_view text)
{
    auto parts = dag::split_path(text);
    NamePath p;
    if (parts.empty()) throw PathSyntaxError("empty path");
    std::size_t head = 0;
    if (text.front() == '/' && (parts[0] == "ipfs" || parts[0] == "ipns")) {
        p.space = parts[0] == "ipns" ? Space::ipns : Space::ipfs;
        head = 1;
        if (parts.size() < 2) throw PathSyntaxError("path '" + std::string(text) + "' has no head");
    }
    p.head = parts[head];
    p.rest.assign(parts.begin() + head + 1, parts.end());
    return p;
}

std::string NamePath::to_string() const
{
    std::string out = space == Space::ipns ? "/ipns/" : "/ipfs/";
    out += head;
    for (const auto& c : rest) out += "/" + c;
    return out;
}

}  // namespace ipfs::ipns
