#include <fstream>
#include <sstream>

#include "ipfs/blockstore/blockstore.hpp"
#include "ipfs/multiformats/base58.hpp"

namespace ipfs::blockstore {

namespace fs = std::filesystem;

namespace {

std::optional<Multihash> key_from_filename(const std::string& name)
{
    try {
        return Multihash::decode(multiformats::base_parse(name));
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

FsBlockStore::FsBlockStore(fs::path root, StoreOptions options) : BlockStore(options), root_(std::move(root))
{
    std::error_code ec;
    fs::create_directories(root_ / "blocks", ec);
    fs::create_directories(root_ / "tmp", ec);
    fs::create_directories(root_ / "quarantine", ec);
    if (ec) throw StoreError("cannot create store at " + root_.string() + ": " + ec.message());
    load();
}

FsBlockStore::~FsBlockStore()
{
    try {
        flush_access_times();
    } catch (...) {
    }
}

fs::path FsBlockStore::block_path(const Multihash& key) const
{
    auto name = key.to_string();
    return root_ / "blocks" / name.substr(0, 2) / name;
}

void FsBlockStore::load()
{
    // Leftover temp files are writes that never reached their rename.
    for (const auto& entry : fs::directory_iterator(root_ / "tmp")) fs::remove(entry.path());

    for (const auto& shard : fs::directory_iterator(root_ / "blocks")) {
        if (!shard.is_directory()) continue;
        for (const auto& file : fs::directory_iterator(shard.path())) {
            if (!file.is_regular_file()) continue;
            if (auto key = key_from_filename(file.path().filename().string()))
                index_insert(*key, file.file_size());
        }
    }

    std::ifstream journal(root_ / "pins");
    std::string line;
    while (std::getline(journal, line)) {
        std::istringstream in(line);
        std::string op, mode, text;
        if (!(in >> op >> mode >> text)) continue;
        auto key = key_from_filename(text);
        if (!key || (op != "P" && op != "U") || (mode != "d" && mode != "r")) continue;
        restore_pin(op == "P", mode == "r", *key);
    }

    std::ifstream atime(root_ / "atime");
    while (std::getline(atime, line)) {
        std::istringstream in(line);
        std::string text;
        std::uint64_t tick = 0;
        if (!(in >> text >> tick)) continue;
        if (auto key = key_from_filename(text); key && has(*key)) restore_access(*key, tick);
    }
}

std::optional<Bytes> FsBlockStore::backend_read(const Multihash& key) const
{
    std::ifstream in(block_path(key), std::ios::binary);
    if (!in) return std::nullopt;
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void FsBlockStore::backend_write(const Multihash& key, ByteView bytes)
{
    auto final_path = block_path(key);
    auto tmp = root_ / "tmp" / (key.to_string() + "." + std::to_string(++tmp_counter_));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw StoreError("failed writing " + tmp.string());
    }
    if (fail_next_write_) {
        fail_next_write_ = false;
        throw StoreError("simulated crash before rename of " + tmp.string());
    }
    std::error_code ec;
    fs::create_directories(final_path.parent_path(), ec);
    fs::rename(tmp, final_path, ec);
    if (ec) throw StoreError("failed to move block into place: " + ec.message());
}

void FsBlockStore::backend_erase(const Multihash& key)
{
    std::error_code ec;
    fs::remove(block_path(key), ec);
}

void FsBlockStore::backend_quarantine(const Multihash& key)
{
    std::error_code ec;
    fs::rename(block_path(key), root_ / "quarantine" / key.to_string(), ec);
}

void FsBlockStore::backend_record_pin(bool add, bool recursive, const Multihash& key)
{
    std::lock_guard lock(journal_mutex_);
    std::ofstream out(root_ / "pins", std::ios::app);
    out << (add ? 'P' : 'U') << ' ' << (recursive ? 'r' : 'd') << ' ' << key.to_string() << '\n';
    if (!out) throw StoreError("failed to append to pin journal");
}

void FsBlockStore::flush_access_times() const
{
    auto tmp = root_ / "tmp" / "atime.new";
    {
        std::ofstream out(tmp, std::ios::trunc);
        for (const auto& [key, tick] : access_snapshot()) out << key.to_string() << ' ' << tick << '\n';
    }
    std::error_code ec;
    fs::rename(tmp, root_ / "atime", ec);
}

}  // namespace ipfs::blockstore
