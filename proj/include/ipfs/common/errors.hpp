#pragma once

#include <stdexcept>
#include <string>

namespace ipfs {

// Base for every error raised by the library. kind() is the stable error
// class name ("PathNotFound", "IntegrityError", ...) that the CLI prints.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define IPFS_DECLARE_ERROR(Name)                                              \
    class Name : public ::ipfs::Error {                                       \
    public:                                                                   \
        explicit Name(const std::string& what) : ::ipfs::Error(#Name, what) {} \
    }

}  // namespace ipfs
