#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ipfs/common/errors.hpp"

namespace ipfs {

IPFS_DECLARE_ERROR(ConfigError);

// Flat "key = value" text files. Blank lines and lines starting with '#'
// are skipped; keys are unique and printed back in sorted order.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::string& path);

    std::string print() const;
    void save(const std::string& path) const;

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    const std::map<std::string, std::string>& entries() const { return values_; }

    bool operator==(const KeyValueConfig&) const = default;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace ipfs
