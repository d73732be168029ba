#include "ipfs/files/files.hpp"

#include <algorithm>
#include <ctime>
#include <deque>
#include <fstream>
#include <limits>
#include <set>

#include "ipfs/common/wire.hpp"

namespace ipfs::files {

using dag::DagLink;
using dag::DagObject;

GapError::GapError(const Multihash& key, std::uint64_t begin, std::uint64_t end)
    : dag::FetchError(key, {},
                      "missing file bytes [" + std::to_string(begin) + ", " +
                          (end == std::numeric_limits<std::uint64_t>::max() ? std::string("end")
                                                                             : std::to_string(end)) +
                          ")"),
      begin_(begin), end_(end)
{
}

std::string_view kind_name(Kind k)
{
    switch (k) {
    case Kind::blob: return "blob";
    case Kind::list: return "list";
    case Kind::tree: return "tree";
    case Kind::commit: return "commit";
    case Kind::flat_tree: return "flattened-tree";
    case Kind::ipns_link: return "ipns";
    }
    return "unknown";
}

Kind parse_kind(std::string_view name)
{
    for (auto k : {Kind::blob, Kind::list, Kind::tree, Kind::commit, Kind::flat_tree, Kind::ipns_link})
        if (kind_name(k) == name) return k;
    throw KindError("unknown object kind '" + std::string(name) + "'");
}

namespace {

Kind to_kind(std::uint8_t b)
{
    if (b < 1 || b > 6) throw KindError("unknown kind byte " + std::to_string(b));
    return static_cast<Kind>(b);
}

Bytes kinds_data(Kind self, const std::vector<Kind>& kinds)
{
    Writer w;
    w.byte(static_cast<std::uint8_t>(self)).uvarint(kinds.size());
    for (auto k : kinds) w.byte(static_cast<std::uint8_t>(k));
    return std::move(w).bytes();
}

void check_tree_names(const std::vector<DagLink>& links)
{
    std::set<std::string_view> seen;
    for (const auto& l : links) {
        if (l.name.empty() || l.name.find('/') != std::string::npos)
            throw KindError("tree entry name '" + l.name + "' is invalid");
        if (!seen.insert(l.name).second) throw KindError("tree entry name '" + l.name + "' repeats");
    }
}

}  // namespace

FileNode FileNode::parse(const DagObject& obj)
{
    FileNode node;
    try {
        Reader r(obj.data);
        node.kind = to_kind(r.byte());
        switch (node.kind) {
        case Kind::blob: {
            if (!obj.links.empty()) throw KindError("blob has links");
            auto rest = r.rest();
            node.content.assign(rest.begin(), rest.end());
            return node;
        }
        case Kind::list:
        case Kind::tree:
        case Kind::flat_tree: {
            auto n = r.uvarint();
            if (n != obj.links.size()) throw KindError("kind array length does not match link count");
            for (std::uint64_t i = 0; i < n; ++i) node.child_kinds.push_back(to_kind(r.byte()));
            r.expect_done("kind array");
            if (node.kind == Kind::list) {
                for (auto k : node.child_kinds)
                    if (k != Kind::blob && k != Kind::list) throw KindError("list child must be a blob or list");
                for (const auto& l : obj.links)
                    if (!l.name.empty()) throw KindError("list links are unnamed");
            } else if (node.kind == Kind::tree) {
                check_tree_names(obj.links);
            }
            return node;
        }
        case Kind::commit: {
            node.commit.type = to_kind(r.byte());
            node.commit.date = r.string();
            node.commit.message = r.string();
            r.expect_done("commit");
            int objects = 0, authors = 0;
            for (const auto& l : obj.links) {
                if (l.name == "object")
                    ++objects;
                else if (l.name == "author")
                    ++authors;
                else if (l.name != "parent")
                    throw KindError("commit link '" + l.name + "' is not parent, object or author");
            }
            if (objects != 1 || authors > 1) throw KindError("commit needs one object link and at most one author");
            return node;
        }
        case Kind::ipns_link: {
            auto target = r.length_prefixed();
            node.ipns_target.assign(target.begin(), target.end());
            r.expect_done("ipns link");
            if (!obj.links.empty()) throw KindError("ipns link has links");
            Multihash::decode(node.ipns_target);
            return node;
        }
        }
    } catch (const KindError&) {
        throw;
    } catch (const Error& e) {
        throw KindError(std::string("malformed file object: ") + e.what());
    }
    throw KindError("unreachable kind");
}

Kind kind_of(const DagObject& obj)
{
    if (obj.data.empty()) throw KindError("object carries no kind byte");
    return to_kind(obj.data[0]);
}

DagObject make_blob(ByteView data)
{
    DagObject obj;
    obj.data.reserve(data.size() + 1);
    obj.data.push_back(static_cast<std::uint8_t>(Kind::blob));
    append(obj.data, data);
    return obj;
}

DagObject make_ipns_link(const Multihash& node_id)
{
    Writer w;
    w.byte(static_cast<std::uint8_t>(Kind::ipns_link)).length_prefixed(node_id.encode());
    return DagObject{{}, std::move(w).bytes()};
}

// --- files ---

namespace {

struct Piece {
    Multihash hash;
    Kind kind;
    std::uint64_t length;
};

Piece store_list(const std::vector<Piece>& parts, blockstore::BlockStore& store)
{
    DagObject list;
    std::vector<Kind> kinds;
    std::uint64_t total = 0;
    for (const auto& p : parts) {
        list.links.push_back(DagLink{"", p.hash, p.length});
        kinds.push_back(p.kind);
        total += p.length;
    }
    list.data = kinds_data(Kind::list, kinds);
    return Piece{dag::put_object(store, list), Kind::list, total};
}

}  // namespace

Multihash add_file(ByteView data, const Chunker& chunker, blockstore::BlockStore& store)
{
    std::vector<Piece> level;
    std::size_t start = 0;
    for (auto end : chunker.boundaries(data)) {
        auto chunk = data.subspan(start, end - start);
        level.push_back(Piece{dag::put_object(store, make_blob(chunk)), Kind::blob, chunk.size()});
        start = end;
    }
    while (level.size() > 1) {
        std::vector<Piece> next;
        for (std::size_t i = 0; i < level.size(); i += kMaxListFanout) {
            auto last = std::min(level.size(), i + kMaxListFanout);
            next.push_back(store_list({level.begin() + i, level.begin() + last}, store));
        }
        level = std::move(next);
    }
    return level.front().hash;
}

namespace {

constexpr auto kUnknownEnd = std::numeric_limits<std::uint64_t>::max();

DagObject fetch_file_object(const Multihash& key, std::uint64_t offset, std::uint64_t end,
                            const dag::DagReader& reader)
{
    try {
        return reader.object(key);
    } catch (const GapError&) {
        throw;
    } catch (const dag::FetchError&) {
        throw GapError(key, offset, end);
    }
}

void cat_into(const Multihash& key, std::uint64_t end, const dag::DagReader& reader, Bytes& out)
{
    auto obj = fetch_file_object(key, out.size(), end, reader);
    auto node = FileNode::parse(obj);
    if (node.kind == Kind::blob) {
        append(out, node.content);
        return;
    }
    if (node.kind != Kind::list)
        throw KindError("object " + key.to_string() + " is a " + std::string(kind_name(node.kind)) + ", not a file");
    for (const auto& link : obj.links) cat_into(link.hash, out.size() + link.size, reader, out);
}

}  // namespace

Bytes cat(const Multihash& key, const dag::DagReader& reader)
{
    Bytes out;
    cat_into(key, kUnknownEnd, reader, out);
    return out;
}

std::uint64_t file_size(const Multihash& key, const dag::DagReader& reader)
{
    auto obj = reader.object(key);
    auto node = FileNode::parse(obj);
    if (node.kind == Kind::blob) return node.content.size();
    if (node.kind != Kind::list) throw KindError("object " + key.to_string() + " is not a file");
    std::uint64_t total = 0;
    for (const auto& l : obj.links) total += l.size;
    return total;
}

TreeEntry tree_entry(std::string name, const Multihash& key, const dag::DagReader& reader)
{
    auto obj = reader.object(key);
    return TreeEntry{std::move(name), key, kind_of(obj), obj.cumulative_size()};
}

DagObject build_tree(std::vector<TreeEntry> entries)
{
    std::sort(entries.begin(), entries.end(), [](const TreeEntry& a, const TreeEntry& b) { return a.name < b.name; });
    DagObject tree;
    std::vector<Kind> kinds;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.name.empty() || e.name.find('/') != std::string::npos)
            throw NameError("tree entry name '" + e.name + "' must be non-empty and contain no '/'");
        if (i > 0 && entries[i - 1].name == e.name) throw NameError("duplicate tree entry name '" + e.name + "'");
        if (e.kind == Kind::flat_tree) throw NameError("tree entry '" + e.name + "' cannot be a flattened tree");
        tree.links.push_back(DagLink{e.name, e.hash, e.size});
        kinds.push_back(e.kind);
    }
    tree.data = kinds_data(Kind::tree, kinds);
    return tree;
}

Multihash make_tree(std::vector<TreeEntry> entries, blockstore::BlockStore& store)
{
    return dag::put_object(store, build_tree(std::move(entries)));
}

std::vector<TreeEntry> tree_entries(const Multihash& tree, const dag::DagReader& reader)
{
    auto obj = reader.object(tree);
    auto node = FileNode::parse(obj);
    if (node.kind != Kind::tree) throw KindError("object " + tree.to_string() + " is not a tree");
    std::vector<TreeEntry> out;
    for (std::size_t i = 0; i < obj.links.size(); ++i)
        out.push_back(TreeEntry{obj.links[i].name, obj.links[i].hash, node.child_kinds[i], obj.links[i].size});
    return out;
}

Multihash add_path(const std::filesystem::path& path, const Chunker& chunker, blockstore::BlockStore& store)
{
    namespace fs = std::filesystem;
    if (fs::is_directory(path)) {
        dag::DagReader reader(dag::store_getter(store));
        std::vector<TreeEntry> entries;
        for (const auto& item : fs::directory_iterator(path)) {
            if (!item.is_directory() && !item.is_regular_file()) continue;
            auto key = add_path(item.path(), chunker, store);
            entries.push_back(tree_entry(item.path().filename().string(), key, reader));
        }
        return make_tree(std::move(entries), store);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw blockstore::StoreError("cannot read " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return add_file(data, chunker, store);
}

std::string utc_date(std::int64_t unix_seconds)
{
    std::time_t t = static_cast<std::time_t>(unix_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%SZ", &tm);
    return buf;
}

Multihash make_commit(const CommitFields& fields, blockstore::BlockStore& store, const dag::DagReader& reader)
{
    DagObject commit;
    for (const auto& p : fields.parents) {
        auto parent = reader.object(p);
        if (kind_of(parent) != Kind::commit) throw KindError("parent " + p.to_string() + " is not a commit");
        commit.links.push_back(DagLink{"parent", p, parent.cumulative_size()});
    }
    auto target = reader.object(fields.object);
    auto type = kind_of(target);
    commit.links.push_back(DagLink{"object", fields.object, target.cumulative_size()});
    if (fields.author) commit.links.push_back(DagLink{"author", *fields.author, reader.object(*fields.author).cumulative_size()});
    Writer w;
    w.byte(static_cast<std::uint8_t>(Kind::commit)).byte(static_cast<std::uint8_t>(type));
    w.string(fields.date).string(fields.message);
    commit.data = std::move(w).bytes();
    return dag::put_object(store, commit);
}

Multihash make_author(std::string_view name, const Multihash& node_id, blockstore::BlockStore& store)
{
    auto name_blob = make_blob(as_view(name));
    auto node_blob = make_blob(node_id.encode());
    dag::put_object(store, name_blob);
    dag::put_object(store, node_blob);
    return make_tree({{"name", name_blob.key(), Kind::blob, name_blob.cumulative_size()},
                      {"node", node_blob.key(), Kind::blob, node_blob.cumulative_size()}},
                     store);
}

namespace {

void flatten_into(const Multihash& tree, const std::string& prefix, const dag::DagReader& reader, DagObject& flat,
                  std::vector<Kind>& kinds)
{
    for (auto& e : tree_entries(tree, reader)) {
        auto path = prefix.empty() ? e.name : prefix + "/" + e.name;
        flat.links.push_back(DagLink{path, e.hash, e.size});
        kinds.push_back(e.kind);
        if (e.kind == Kind::tree) flatten_into(e.hash, path, reader, flat, kinds);
    }
}

void diff_into(const Multihash& a, const Multihash& b, const std::string& prefix, const dag::DagReader& reader,
               std::vector<DiffRow>& rows)
{
    if (a == b) return;
    auto left = tree_entries(a, reader);
    auto right = tree_entries(b, reader);
    auto join = [&](const std::string& name) { return prefix.empty() ? name : prefix + "/" + name; };
    std::size_t i = 0, j = 0;
    while (i < left.size() || j < right.size()) {
        if (j == right.size() || (i < left.size() && left[i].name < right[j].name)) {
            rows.push_back(DiffRow{join(left[i].name), Change::removed, left[i].hash, std::nullopt});
            ++i;
        } else if (i == left.size() || right[j].name < left[i].name) {
            rows.push_back(DiffRow{join(right[j].name), Change::added, std::nullopt, right[j].hash});
            ++j;
        } else {
            const auto& l = left[i];
            const auto& r = right[j];
            if (l.hash != r.hash) {
                if (l.kind == Kind::tree && r.kind == Kind::tree)
                    diff_into(l.hash, r.hash, join(l.name), reader, rows);
                else
                    rows.push_back(DiffRow{join(l.name), Change::modified, l.hash, r.hash});
            }
            ++i;
            ++j;
        }
    }
}

struct CommitView {
    Multihash object;
    Kind type;
    std::vector<Multihash> parents;
};

CommitView read_commit(const Multihash& key, const dag::DagReader& reader)
{
    auto obj = reader.object(key);
    auto node = FileNode::parse(obj);
    if (node.kind != Kind::commit) throw KindError("object " + key.to_string() + " is not a commit");
    CommitView view{{}, node.commit.type, {}};
    for (const auto& l : obj.links) {
        if (l.name == "object") view.object = l.hash;
        if (l.name == "parent") view.parents.push_back(l.hash);
    }
    return view;
}

}  // namespace

DagObject flatten_tree(const Multihash& tree, const dag::DagReader& reader)
{
    DagObject flat;
    std::vector<Kind> kinds;
    flatten_into(tree, "", reader, flat, kinds);
    flat.data = kinds_data(Kind::flat_tree, kinds);
    return flat;
}

std::string_view change_name(Change c)
{
    switch (c) {
    case Change::added: return "added";
    case Change::removed: return "removed";
    case Change::modified: return "modified";
    }
    return "unknown";
}

std::vector<DiffRow> diff_trees(const Multihash& a, const Multihash& b, const dag::DagReader& reader)
{
    std::vector<DiffRow> rows;
    diff_into(a, b, "", reader, rows);
    return rows;
}

std::vector<DiffRow> diff_commits(const Multihash& a, const Multihash& b, const dag::DagReader& reader)
{
    if (a == b) return {};
    auto left = read_commit(a, reader);
    auto right = read_commit(b, reader);
    if (left.object == right.object) return {};
    if (left.type == Kind::tree && right.type == Kind::tree) return diff_trees(left.object, right.object, reader);
    return {DiffRow{"", Change::modified, left.object, right.object}};
}

LogResult log(const Multihash& head, const dag::DagReader& reader)
{
    LogResult result;
    std::set<Multihash> seen{head};
    std::deque<Multihash> queue{head};
    while (!queue.empty()) {
        auto key = queue.front();
        queue.pop_front();
        CommitView view;
        try {
            view = read_commit(key, reader);
        } catch (const dag::FetchError&) {
            if (!result.missing) result.missing = key;
            continue;
        }
        result.commits.push_back(key);
        for (const auto& p : view.parents)
            if (seen.insert(p).second) queue.push_back(p);
    }
    return result;
}

}  // namespace ipfs::files
