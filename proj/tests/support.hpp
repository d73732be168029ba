#pragma once

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "ipfs/common/bytes.hpp"
#include "ipfs/common/rng.hpp"

namespace test {

using ipfs::Bytes;

// `hex SPACE hex` rows from tests/vectors/<name>.
inline std::vector<std::pair<Bytes, Bytes>> vectors(const std::string& name)
{
    std::ifstream in(std::string(IPFS_VECTOR_DIR) + "/" + name);
    REQUIRE_MESSAGE(in.good(), "missing vector file " << name);
    std::vector<std::pair<Bytes, Bytes>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto sp = line.find(' ');
        REQUIRE(sp != std::string::npos);
        rows.emplace_back(ipfs::from_hex(line.substr(0, sp)), ipfs::from_hex(line.substr(sp + 1)));
    }
    return rows;
}

// Sizes for property runs: mostly small, now and then large.
inline std::size_t property_size(ipfs::Rng& rng, std::size_t large = 8u << 20)
{
    auto roll = rng.uniform(1000);
    if (roll < 2) return static_cast<std::size_t>(rng.uniform(large) + 1);
    if (roll < 50) return static_cast<std::size_t>(rng.uniform(256 * 1024));
    return static_cast<std::size_t>(rng.uniform(4096));
}

class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("ipfs-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const Bytes& data)
{
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

}  // namespace test
