#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ipfs/common/bytes.hpp"
#include "ipfs/multiformats/multihash.hpp"

namespace ipfs::multiformats {

enum class Protocol : std::uint64_t {
    ip4 = 0x04,
    tcp = 0x06,
    ip6 = 0x29,
    sctp = 0x84,
    udp = 0x0111,
    // Simulated transport; payload is a varint node address. Code taken
    // from the private-use range.
    sim = 0x300000,
};

std::string_view protocol_name(Protocol p);

struct AddrComponent {
    Protocol protocol;
    Bytes payload;

    bool operator==(const AddrComponent&) const = default;
    auto operator<=>(const AddrComponent&) const = default;
};

// Encapsulating address, outermost component first.
class Multiaddr {
public:
    Multiaddr() = default;
    explicit Multiaddr(std::vector<AddrComponent> components);

    // "/ip4/10.20.30.40/sctp/1234/": trailing slash tolerated.
    // Unknown protocol names throw RegistryError, bad payloads PayloadError.
    static Multiaddr parse(std::string_view text);
    static Multiaddr decode(ByteView raw);
    static Multiaddr sim(std::uint64_t node);

    std::string to_string() const;
    Bytes encode() const;

    const std::vector<AddrComponent>& components() const { return components_; }
    bool empty() const { return components_.empty(); }

    // Address of the first /sim component, if any.
    std::optional<std::uint64_t> sim_node() const;

    // Appends other's components (proxying / encapsulation).
    Multiaddr encapsulate(const Multiaddr& inner) const;

    bool operator==(const Multiaddr&) const = default;
    auto operator<=>(const Multiaddr&) const = default;

private:
    std::vector<AddrComponent> components_;
};

}  // namespace ipfs::multiformats
