#include "ipfs/multiformats/multiaddr.hpp"

#include <arpa/inet.h>

#include <charconv>

namespace ipfs::multiformats {

namespace {

struct ProtocolInfo {
    Protocol protocol;
    std::string_view name;
    int size;  // payload bytes; -1 = varint payload
};

constexpr ProtocolInfo kProtocols[] = {
    {Protocol::ip4, "ip4", 4},   {Protocol::tcp, "tcp", 2},  {Protocol::ip6, "ip6", 16},
    {Protocol::sctp, "sctp", 2}, {Protocol::udp, "udp", 2},  {Protocol::sim, "sim", -1},
};

const ProtocolInfo* by_name(std::string_view name)
{
    for (const auto& p : kProtocols)
        if (p.name == name) return &p;
    return nullptr;
}

const ProtocolInfo* by_code(std::uint64_t code)
{
    for (const auto& p : kProtocols)
        if (static_cast<std::uint64_t>(p.protocol) == code) return &p;
    return nullptr;
}

std::uint64_t parse_number(std::string_view text, std::uint64_t max, std::string_view what)
{
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw PayloadError("invalid " + std::string(what) + " '" + std::string(text) + "'");
    if (v > max) throw PayloadError(std::string(what) + " " + std::string(text) + " out of range");
    return v;
}

Bytes payload_from_text(const ProtocolInfo& p, std::string_view text)
{
    switch (p.protocol) {
    case Protocol::ip4: {
        Bytes out(4);
        std::string s(text);
        if (inet_pton(AF_INET, s.c_str(), out.data()) != 1) throw PayloadError("invalid ip4 address '" + s + "'");
        return out;
    }
    case Protocol::ip6: {
        Bytes out(16);
        std::string s(text);
        if (inet_pton(AF_INET6, s.c_str(), out.data()) != 1) throw PayloadError("invalid ip6 address '" + s + "'");
        return out;
    }
    case Protocol::tcp:
    case Protocol::udp:
    case Protocol::sctp: {
        auto port = parse_number(text, 65535, "port");
        return Bytes{static_cast<std::uint8_t>(port >> 8), static_cast<std::uint8_t>(port)};
    }
    case Protocol::sim:
        return uvarint(parse_number(text, (1ULL << 28) - 1, "sim node id"));
    }
    throw RegistryError("unhandled protocol");
}

std::string payload_to_text(const AddrComponent& c)
{
    switch (c.protocol) {
    case Protocol::ip4: {
        char buf[INET_ADDRSTRLEN];
        inet_ntop(AF_INET, c.payload.data(), buf, sizeof buf);
        return buf;
    }
    case Protocol::ip6: {
        char buf[INET6_ADDRSTRLEN];
        inet_ntop(AF_INET6, c.payload.data(), buf, sizeof buf);
        return buf;
    }
    case Protocol::tcp:
    case Protocol::udp:
    case Protocol::sctp:
        return std::to_string((static_cast<unsigned>(c.payload[0]) << 8) | c.payload[1]);
    case Protocol::sim: {
        std::size_t used = 0;
        return std::to_string(get_uvarint(c.payload, used, kMaxHeaderVarintBytes));
    }
    }
    return {};
}

void validate(const AddrComponent& c)
{
    auto* info = by_code(static_cast<std::uint64_t>(c.protocol));
    if (!info) throw RegistryError("unknown multiaddr protocol code " + std::to_string(static_cast<std::uint64_t>(c.protocol)));
    if (info->size >= 0 && c.payload.size() != static_cast<std::size_t>(info->size))
        throw PayloadError(std::string(info->name) + " payload must be " + std::to_string(info->size) + " bytes");
    if (info->size < 0) {
        std::size_t used = 0;
        try {
            get_uvarint(c.payload, used, kMaxHeaderVarintBytes);
        } catch (const Error& e) {
            throw PayloadError(std::string("bad sim payload: ") + e.what());
        }
        if (used != c.payload.size()) throw PayloadError("trailing bytes in sim payload");
    }
}

}  // namespace

std::string_view protocol_name(Protocol p)
{
    auto* info = by_code(static_cast<std::uint64_t>(p));
    return info ? info->name : std::string_view("unknown");
}

Multiaddr::Multiaddr(std::vector<AddrComponent> components) : components_(std::move(components))
{
    for (const auto& c : components_) validate(c);
}

Multiaddr Multiaddr::parse(std::string_view text)
{
    if (text.empty() || text.front() != '/') throw PayloadError("multiaddr must begin with '/'");
    std::vector<std::string_view> parts;
    std::size_t pos = 1;
    while (pos <= text.size()) {
        auto next = text.find('/', pos);
        if (next == std::string_view::npos) next = text.size();
        parts.push_back(text.substr(pos, next - pos));
        pos = next + 1;
    }
    if (!parts.empty() && parts.back().empty()) parts.pop_back();  // trailing slash

    std::vector<AddrComponent> out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        auto* info = by_name(parts[i]);
        if (!info) throw RegistryError("unknown multiaddr protocol '" + std::string(parts[i]) + "'");
        if (i + 1 >= parts.size()) throw PayloadError("protocol '" + std::string(info->name) + "' is missing its value");
        out.push_back({info->protocol, payload_from_text(*info, parts[++i])});
    }
    return Multiaddr(std::move(out));
}

Multiaddr Multiaddr::decode(ByteView raw)
{
    std::vector<AddrComponent> out;
    Reader r(raw);
    while (!r.done()) {
        auto code = r.uvarint(kMaxHeaderVarintBytes);
        auto* info = by_code(code);
        if (!info) throw RegistryError("unknown multiaddr protocol code " + std::to_string(code));
        if (info->size >= 0) {
            auto p = r.take(static_cast<std::size_t>(info->size));
            out.push_back({info->protocol, Bytes(p.begin(), p.end())});
        } else {
            auto start = r.offset();
            r.uvarint(kMaxHeaderVarintBytes);
            auto p = raw.subspan(start, r.offset() - start);
            out.push_back({info->protocol, Bytes(p.begin(), p.end())});
        }
    }
    return Multiaddr(std::move(out));
}

Multiaddr Multiaddr::sim(std::uint64_t node) { return Multiaddr({{Protocol::sim, uvarint(node)}}); }

std::string Multiaddr::to_string() const
{
    if (components_.empty()) return "/";
    std::string out;
    for (const auto& c : components_) {
        out += '/';
        out += protocol_name(c.protocol);
        out += '/';
        out += payload_to_text(c);
    }
    return out;
}

Bytes Multiaddr::encode() const
{
    Bytes out;
    for (const auto& c : components_) {
        put_uvarint(out, static_cast<std::uint64_t>(c.protocol));
        append(out, c.payload);
    }
    return out;
}

std::optional<std::uint64_t> Multiaddr::sim_node() const
{
    for (const auto& c : components_) {
        if (c.protocol == Protocol::sim) {
            std::size_t used = 0;
            return get_uvarint(c.payload, used, kMaxHeaderVarintBytes);
        }
    }
    return std::nullopt;
}

Multiaddr Multiaddr::encapsulate(const Multiaddr& inner) const
{
    auto all = components_;
    all.insert(all.end(), inner.components_.begin(), inner.components_.end());
    return Multiaddr(std::move(all));
}

}  // namespace ipfs::multiformats
