#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipfs/blockstore/blockstore.hpp"
#include "ipfs/merkledag/dag.hpp"

namespace ipfs::files {

using multiformats::Multihash;

IPFS_DECLARE_ERROR(KindError);
IPFS_DECLARE_ERROR(NameError);
IPFS_DECLARE_ERROR(ParamError);

// A file read that hit a missing block. The gap is [begin, end) in file
// bytes; end is UINT64_MAX when the extent is unknown.
class GapError : public dag::FetchError {
public:
    GapError(const Multihash& key, std::uint64_t begin, std::uint64_t end);
    std::uint64_t begin() const noexcept { return begin_; }
    std::uint64_t end() const noexcept { return end_; }

private:
    std::uint64_t begin_;
    std::uint64_t end_;
};

// First data byte of every file object.
enum class Kind : std::uint8_t {
    blob = 1,
    list = 2,
    tree = 3,
    commit = 4,
    flat_tree = 5,
    ipns_link = 6,  // tree entry standing in for another node's namespace
};

std::string_view kind_name(Kind k);
Kind parse_kind(std::string_view name);  // KindError on unknown names

constexpr std::size_t kMaxListFanout = 1024;

struct CommitInfo {
    Kind type = Kind::tree;  // kind of the "object" target
    std::string date;        // "YYYY-MM-DD HH:MM:SSZ"
    std::string message;
};

// Typed view of a DagObject. parse() checks the per-kind invariants and
// throws KindError when they fail.
struct FileNode {
    Kind kind = Kind::blob;
    Bytes content;                 // blob payload
    std::vector<Kind> child_kinds; // list, tree and flat_tree
    CommitInfo commit;
    Bytes ipns_target;             // encoded NodeId of an ipns_link

    static FileNode parse(const dag::DagObject& obj);
};

Kind kind_of(const dag::DagObject& obj);

dag::DagObject make_blob(ByteView data);
dag::DagObject make_ipns_link(const Multihash& node_id);

// --- chunking ---

// Splits a buffer into consecutive chunks, returned as end offsets. The last
// offset always equals the input length; empty input yields {0}.
class Chunker {
public:
    virtual ~Chunker() = default;
    virtual std::vector<std::size_t> boundaries(ByteView data) const = 0;
    virtual std::string describe() const = 0;
};

class FixedChunker : public Chunker {
public:
    explicit FixedChunker(std::size_t size);
    std::vector<std::size_t> boundaries(ByteView data) const override;
    std::string describe() const override;

private:
    std::size_t size_;
};

struct RabinParams {
    std::size_t min = 2 * 1024;
    std::size_t avg = 8 * 1024;
    std::size_t max = 64 * 1024;
    std::size_t window = 48;
    std::uint64_t polynomial = 0x3DA3358B4DC173;  // irreducible, degree 53
};

// Content-defined chunking over a Rabin fingerprint of the trailing window.
// A boundary falls where (fp & mask) == mask once the chunk reaches min
// bytes; mask has round(log2(avg - min)) low bits so that chunks average
// about avg. Chunks are cut at max regardless.
class RabinChunker : public Chunker {
public:
    explicit RabinChunker(RabinParams params = {});
    std::vector<std::size_t> boundaries(ByteView data) const override;
    std::string describe() const override;
    const RabinParams& params() const { return params_; }
    std::uint64_t mask() const { return mask_; }

private:
    RabinParams params_;
    std::uint64_t mask_ = 0;
    std::uint64_t out_table_[256] = {};
    std::uint64_t mod_table_[256] = {};
    int shift_ = 0;
};

std::vector<std::size_t> chunk_rabin(ByteView data, const RabinParams& params);

// --- files ---

// Stores each chunk as a blob; a multi-chunk file is rooted at a list (or
// a list of lists past kMaxListFanout chunks). List link sizes are file
// byte lengths.
Multihash add_file(ByteView data, const Chunker& chunker, blockstore::BlockStore& store);

// Concatenates leaf blobs left to right. KindError for non-file objects,
// GapError when a block is missing.
Bytes cat(const Multihash& key, const dag::DagReader& reader);

// Byte length of a blob or list without reading leaves.
std::uint64_t file_size(const Multihash& key, const dag::DagReader& reader);

struct TreeEntry {
    std::string name;
    Multihash hash;
    Kind kind = Kind::blob;
    std::uint64_t size = 0;  // cumulative size of the target
};

// Entry for an existing object, reading its kind and size.
TreeEntry tree_entry(std::string name, const Multihash& key, const dag::DagReader& reader);

// Entries are sorted by name bytes. NameError on empty, slashed or
// duplicate names.
dag::DagObject build_tree(std::vector<TreeEntry> entries);
Multihash make_tree(std::vector<TreeEntry> entries, blockstore::BlockStore& store);

std::vector<TreeEntry> tree_entries(const Multihash& tree, const dag::DagReader& reader);

// Adds a directory recursively (regular files and subdirectories only).
Multihash add_path(const std::filesystem::path& path, const Chunker& chunker, blockstore::BlockStore& store);

// "YYYY-MM-DD HH:MM:SSZ" for seconds since the Unix epoch.
std::string utc_date(std::int64_t unix_seconds);

struct CommitFields {
    Multihash object;
    std::vector<Multihash> parents;
    std::optional<Multihash> author;
    std::string date;
    std::string message;
};

// Links are written as parent*, object, author. The target and parents
// must be readable (FetchError otherwise).
Multihash make_commit(const CommitFields& fields, blockstore::BlockStore& store, const dag::DagReader& reader);

// Tree holding a "name" blob and a "node" blob with the encoded NodeId.
Multihash make_author(std::string_view name, const Multihash& node_id, blockstore::BlockStore& store);

// Every object reachable from the tree through tree links, named by its
// slash-joined path, preorder. Lists, blobs and commits are leaves.
dag::DagObject flatten_tree(const Multihash& tree, const dag::DagReader& reader);

enum class Change { added, removed, modified };
std::string_view change_name(Change c);

struct DiffRow {
    std::string path;
    Change change;
    std::optional<Multihash> old_key;
    std::optional<Multihash> new_key;
};

// Compares the commit targets. Equal subtree keys are skipped without
// fetching them.
std::vector<DiffRow> diff_commits(const Multihash& a, const Multihash& b, const dag::DagReader& reader);
std::vector<DiffRow> diff_trees(const Multihash& a, const Multihash& b, const dag::DagReader& reader);

struct LogResult {
    std::vector<Multihash> commits;    // newest first
    std::optional<Multihash> missing;  // set when the history is truncated
};

// Breadth-first over parent links, each commit once.
LogResult log(const Multihash& head, const dag::DagReader& reader);

// The JSON shape printed by file-cat: kind-aware data, and links without
// names for lists.
std::string file_json(const dag::DagObject& obj, int indent = 2);

}  // namespace ipfs::files
