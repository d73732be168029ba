#include <algorithm>

#include "ipfs/files/files.hpp"
#include "ipfs/ipns/ipns.hpp"

namespace ipfs::ipns {

std::vector<NameRecord> lookup_records(const NodeId& id, routing::Routing& routing, SimTime now)
{
    std::vector<NameRecord> valid;
    std::size_t rejected = 0;
    for (const auto& v : routing.get_values(name_key(id))) {
        NameRecord rec;
        try {
            rec = NameRecord::decode(v.value);
        } catch (const Error&) {
            ++rejected;
            continue;
        }
        if (rec.publisher != id || !rec.verify()) {
            ++rejected;
            continue;
        }
        if (rec.expires <= now) continue;
        valid.push_back(std::move(rec));
    }
    if (valid.empty()) {
        if (rejected > 0) throw NameAuthError("no record for " + id.to_string() + " carries a valid signature");
        throw NameNotFound("no current record for " + id.to_string());
    }
    std::sort(valid.begin(), valid.end(), [](const NameRecord& a, const NameRecord& b) {
        if (a.sequence != b.sequence) return a.sequence > b.sequence;
        return a.value.encode() > b.value.encode();
    });
    return valid;
}

NameRecord publish_name(const NodeIdentity& identity, const Multihash& value, routing::Routing& routing, SimTime now,
                        SimTime validity)
{
    std::uint64_t previous = 0;
    try {
        previous = lookup_records(identity.node_id(), routing, now).front().sequence;
    } catch (const NameNotFound&) {
    } catch (const NameAuthError&) {
    }
    auto record = NameRecord::make(identity, value, previous + 1, now + validity);
    routing.set_value(name_key(identity.node_id()), record.encode(), record.sequence);
    return record;
}

namespace {

NamePath with_rest(NamePath base, const std::vector<std::string>& rest, std::size_t from = 0)
{
    base.rest.insert(base.rest.end(), rest.begin() + static_cast<std::ptrdiff_t>(from), rest.end());
    return base;
}

std::optional<std::string> txt_target(const std::vector<std::string>& records)
{
    for (const auto& r : records)
        for (std::string_view key : {"ipns=", "ipfs="})
            if (r.rfind(key, 0) == 0) return r.substr(key.size());
    return std::nullopt;
}

}  // namespace

Multihash Resolver::resolve(const NamePath& path) const { return resolve_at(path, 0); }

Multihash Resolver::resolve_name(const NodeId& id) const { return lookup_records(id, *routing, now).front().value; }

Multihash Resolver::resolve_at(const NamePath& path, std::size_t depth) const
{
    if (depth > depth_limit)
        throw RecursionLimit("name resolution exceeded " + std::to_string(depth_limit) + " indirections");
    auto parse_hash = [](const std::string& text) {
        try {
            return Multihash::parse(text);
        } catch (const Error& e) {
            throw PathSyntaxError("'" + text + "' is not a hash: " + e.what());
        }
    };
    if (path.space == NamePath::Space::ipfs) return walk(parse_hash(path.head), path.rest, depth);

    if (is_domain(path.head)) {
        auto target = dns ? txt_target(dns->txt(path.head)) : std::nullopt;
        if (!target) throw NameNotFound("no ipfs or ipns TXT record for " + path.head);
        if (!target->empty() && target->front() == '/')
            return resolve_at(with_rest(NamePath::parse(*target), path.rest), depth + 1);
        // A bare hash is a name first and an object second.
        try {
            return resolve_at(NamePath{NamePath::Space::ipns, *target, path.rest}, depth + 1);
        } catch (const NameNotFound&) {
            return resolve_at(NamePath{NamePath::Space::ipfs, *target, path.rest}, depth + 1);
        }
    }
    if (looks_like_proquint(path.head)) {
        auto digest = proquint_decode(path.head);
        if (digest.size() != 32)
            throw LengthError("proquint names a " + std::to_string(digest.size()) + "-byte value, not a NodeId digest");
        Multihash id(static_cast<std::uint64_t>(multiformats::HashCode::sha2_256), digest);
        return resolve_at(NamePath{NamePath::Space::ipns, id.to_string(), path.rest}, depth + 1);
    }
    return walk(resolve_name(parse_hash(path.head)), path.rest, depth + 1);
}

Multihash Resolver::walk(const Multihash& root, const std::vector<std::string>& rest, std::size_t depth) const
{
    Multihash cur = root;
    std::size_t i = 0;
    while (true) {
        dag::DagObject obj;
        try {
            obj = reader->object(cur);
        } catch (const dag::FetchError&) {
            if (i == rest.size()) return cur;
            throw;
        } catch (const DecodeError&) {
            if (i == rest.size()) return cur;
            throw dag::PathNotFound(i, rest[i]);
        }
        std::optional<files::Kind> kind;
        try {
            kind = files::kind_of(obj);
        } catch (const files::KindError&) {
        }
        if (kind == files::Kind::ipns_link) {
            auto node = files::FileNode::parse(obj);
            auto target = Multihash::decode(node.ipns_target);
            return resolve_at(with_rest(NamePath{NamePath::Space::ipns, target.to_string(), {}}, rest, i), depth + 1);
        }
        if (i == rest.size()) return cur;
        const auto* link = obj.find(rest[i]);
        if (!link && kind == files::Kind::commit) link = obj.find("object");  // sub-names live in the snapshot
        else if (link) ++i;
        if (!link) throw dag::PathNotFound(i, rest[i]);
        cur = link->hash;
    }
}

namespace {

dag::DagReader local_first(blockstore::BlockStore& store, const Resolver& resolver)
{
    return dag::DagReader([&store, &resolver](const Multihash& key) -> std::optional<Bytes> {
        if (auto b = store.get(key)) return b;
        return resolver.reader->block(key);
    });
}

std::optional<Multihash> current_root(const NodeIdentity& owner, const Resolver& resolver)
{
    try {
        return resolver.resolve_name(owner.node_id());
    } catch (const NameNotFound&) {
        return std::nullopt;
    }
}

Multihash insert_link(const std::optional<Multihash>& tree, const std::vector<std::string>& path, std::size_t i,
                      const files::TreeEntry& marker, blockstore::BlockStore& store, const dag::DagReader& reader)
{
    std::vector<files::TreeEntry> entries;
    if (tree) entries = files::tree_entries(*tree, reader);
    auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.name == path[i]; });
    if (i + 1 == path.size()) {
        if (it != entries.end()) throw NameError("'" + path[i] + "' is already taken");
        auto entry = marker;
        entry.name = path[i];
        entries.push_back(entry);
    } else {
        std::optional<Multihash> child;
        if (it != entries.end()) {
            if (it->kind != files::Kind::tree) throw NameError("'" + path[i] + "' is not a directory");
            child = it->hash;
            entries.erase(it);
        }
        auto sub = insert_link(child, path, i + 1, marker, store, reader);
        entries.push_back(files::tree_entry(path[i], sub, reader));
    }
    return files::make_tree(std::move(entries), store);
}

}  // namespace

Multihash peer_link(const NodeIdentity& owner, const std::vector<std::string>& path, const NodeId& target,
                    blockstore::BlockStore& store, const Resolver& resolver)
{
    if (path.empty()) throw NameError("peer link needs a name");
    auto reader = local_first(store, resolver);
    auto root = current_root(owner, resolver);
    if (root) {
        auto obj = reader.object(*root);
        if (files::kind_of(obj) == files::Kind::commit) root = obj.find("object")->hash;
        if (files::kind_of(reader.object(*root)) != files::Kind::tree)
            throw NameError("namespace root of " + owner.node_id().to_string() + " is not a tree");
    }
    auto marker = files::make_ipns_link(target);
    dag::put_object(store, marker);
    files::TreeEntry entry{"", marker.key(), files::Kind::ipns_link, marker.cumulative_size()};
    auto new_root = insert_link(root, path, 0, entry, store, reader);
    resolver.routing->provide(new_root);
    publish_name(owner, new_root, *resolver.routing, resolver.now);
    return new_root;
}

NameRecord publish_with_history(const NodeIdentity& identity, const Multihash& value, blockstore::BlockStore& store,
                                const Resolver& resolver, std::string message, std::string date)
{
    auto reader = local_first(store, resolver);
    files::CommitFields fields;
    fields.object = value;
    fields.message = std::move(message);
    fields.date = std::move(date);
    if (auto prev = current_root(identity, resolver)) {
        try {
            if (files::kind_of(reader.object(*prev)) == files::Kind::commit) fields.parents.push_back(*prev);
        } catch (const dag::FetchError&) {
        }
    }
    auto commit = files::make_commit(fields, store, reader);
    resolver.routing->provide(commit);
    return publish_name(identity, commit, *resolver.routing, resolver.now);
}

}  // namespace ipfs::ipns
