#include "ipfs/merkledag/dag.hpp"

#include <algorithm>

#include "ipfs/common/wire.hpp"

namespace ipfs::dag {

PathNotFound::PathNotFound(std::size_t index, const std::string& component)
    : Error("PathNotFound", "no link named '" + component + "' at path component " + std::to_string(index)),
      index_(index)
{
}

FetchError::FetchError(const Multihash& key, std::vector<Multihash> partial, std::string detail)
    : Error("FetchError", "cannot fetch " + key.to_string() + (detail.empty() ? "" : ": " + detail)), key_(key),
      partial_(std::move(partial))
{
}

Bytes DagObject::encode() const
{
    Writer w;
    w.uvarint(links.size());
    for (const auto& link : links) w.string(link.name).length_prefixed(link.hash.encode()).uvarint(link.size);
    w.length_prefixed(data);
    return std::move(w).bytes();
}

DagObject DagObject::decode(ByteView raw)
{
    Reader r(raw);
    DagObject obj;
    auto count = r.uvarint();
    // Every link takes at least three bytes; reject absurd counts early.
    if (count > r.remaining() / 3) r.fail("link count exceeds frame size");
    obj.links.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        DagLink link;
        link.name = r.string();
        auto start = r.offset();
        auto hash = r.length_prefixed();
        try {
            link.hash = Multihash::decode(hash);
        } catch (const Error& e) {
            throw DecodeError(std::string("bad link hash: ") + e.what(), start);
        }
        link.size = r.uvarint();
        obj.links.push_back(std::move(link));
    }
    auto data = r.length_prefixed();
    obj.data.assign(data.begin(), data.end());
    r.expect_done("object");
    return obj;
}

std::uint64_t DagObject::cumulative_size() const
{
    std::uint64_t total = encode().size();
    for (const auto& link : links) total += link.size;
    return total;
}

const DagLink* DagObject::find(std::string_view name) const
{
    for (const auto& link : links)
        if (link.name == name) return &link;
    return nullptr;
}

DagLink link_to(std::string name, const DagObject& target)
{
    return DagLink{std::move(name), target.key(), target.cumulative_size()};
}

Multihash put_object(blockstore::BlockStore& store, const DagObject& obj) { return store.put(obj.encode()); }

BlockGetter store_getter(blockstore::BlockStore& store)
{
    return [&store](const Multihash& key) { return store.get(key); };
}

std::optional<Bytes> DagReader::block(const Multihash& key) const
{
    ++fetches_;
    return getter_(key);
}

DagObject DagReader::object(const Multihash& key) const
{
    auto bytes = block(key);
    if (!bytes) throw FetchError(key);
    if (!key.verify(*bytes)) throw FetchError(key, {}, "content does not match key");
    switch (frame_kind(*bytes)) {
    case FrameKind::signed_object: return verify_signed(decode_signed(*bytes));
    case FrameKind::encrypted_object: return decrypt_object(decode_encrypted(*bytes), keychain_);
    case FrameKind::plain: break;
    }
    return DagObject::decode(*bytes);
}

std::vector<std::string> split_path(std::string_view path)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < path.size()) {
        auto j = path.find('/', i);
        if (j == std::string_view::npos) j = path.size();
        if (j > i) out.emplace_back(path.substr(i, j - i));
        i = j + 1;
    }
    return out;
}

Multihash resolve_path(const Multihash& root, const std::vector<std::string>& path, const DagReader& reader)
{
    Multihash current = root;
    for (std::size_t i = 0; i < path.size(); ++i) {
        auto obj = reader.object(current);
        auto* link = obj.find(path[i]);
        if (!link) throw PathNotFound(i, path[i]);
        current = link->hash;
    }
    return current;
}

std::vector<DagLink> list_links(const Multihash& key, const DagReader& reader) { return reader.object(key).links; }

std::vector<Multihash> refs_recursive(const Multihash& root, const DagReader& reader)
{
    std::vector<Multihash> out;
    std::set<Multihash> seen{root};
    std::vector<Multihash> stack{root};
    while (!stack.empty()) {
        auto key = stack.back();
        stack.pop_back();
        if (key != root) out.push_back(key);
        DagObject obj;
        try {
            obj = reader.object(key);
        } catch (const FetchError& e) {
            throw FetchError(e.key(), out, "traversal incomplete");
        } catch (const DecodeError&) {
            continue;  // raw block: a leaf
        }
        for (auto it = obj.links.rbegin(); it != obj.links.rend(); ++it)
            if (seen.insert(it->hash).second) stack.push_back(it->hash);
    }
    return out;
}

blockstore::LinkResolver link_resolver(const DagReader& reader)
{
    return [&reader](const Multihash& key) -> std::optional<std::vector<Multihash>> {
        std::vector<Multihash> out;
        try {
            for (const auto& link : reader.object(key).links) out.push_back(link.hash);
        } catch (const FetchError&) {
            return std::nullopt;
        } catch (const Error&) {
            // Undecodable or locked objects contribute no links.
        }
        return out;
    };
}

Multihash publish(const DagObject& obj, blockstore::BlockStore& store, routing::Routing& routing)
{
    auto key = put_object(store, obj);
    try {
        routing.provide(key);
    } catch (const Error& e) {
        throw PublishError("routing rejected announcement of " + key.to_string() + ": " + e.what());
    }
    return key;
}

bool verify_link_sizes(const DagObject& obj, const DagReader& reader)
{
    for (const auto& link : obj.links) {
        auto bytes = reader.block(link.hash);
        if (!bytes) continue;
        std::uint64_t actual = bytes->size();
        if (frame_kind(*bytes) == FrameKind::plain) {
            try {
                actual = DagObject::decode(*bytes).cumulative_size();
            } catch (const Error&) {
            }
        }
        if (actual != link.size) return false;
    }
    return true;
}

}  // namespace ipfs::dag
