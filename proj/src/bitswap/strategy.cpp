#include "ipfs/bitswap/strategy.hpp"

#include <cmath>

#include "ipfs/common/wire.hpp"

namespace ipfs::bitswap {

Bytes Ledger::encode() const
{
    Writer w;
    w.length_prefixed(owner.encode())
        .length_prefixed(partner.encode())
        .uvarint(bytes_sent)
        .uvarint(bytes_recv)
        .uvarint(static_cast<std::uint64_t>(timestamp.count()));
    return std::move(w).bytes();
}

Ledger Ledger::decode(ByteView raw)
{
    Reader r(raw);
    Ledger l;
    l.owner = multiformats::Multihash::decode(r.length_prefixed());
    l.partner = multiformats::Multihash::decode(r.length_prefixed());
    l.bytes_sent = r.uvarint();
    l.bytes_recv = r.uvarint();
    l.timestamp = SimTime(static_cast<std::int64_t>(r.uvarint()));
    r.expect_done("ledger");
    if (l.owner == l.partner) throw DecodeError("ledger owner equals partner", 0);
    return l;
}

double debt_ratio(std::uint64_t bytes_sent, std::uint64_t bytes_recv)
{
    return static_cast<double>(bytes_sent) / (static_cast<double>(bytes_recv) + 1.0);
}

double debt_ratio(const Ledger& ledger) { return debt_ratio(ledger.bytes_sent, ledger.bytes_recv); }

double send_probability(double r)
{
    // 1 - 1/(1+e^x) == 1/(1+e^-x); this form stays accurate for large r.
    return 1.0 / (1.0 + std::exp(3.0 * r - 6.0));
}

}  // namespace ipfs::bitswap
