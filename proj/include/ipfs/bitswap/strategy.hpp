#pragma once

#include <cstdint>
#include <string>

#include "ipfs/common/bytes.hpp"
#include "ipfs/common/time.hpp"
#include "ipfs/identity/identity.hpp"

namespace ipfs::bitswap {

using identity::NodeId;

// Byte accounting between this node (owner) and one partner. Counters only
// grow, except when the ledger is reinitialised to zero.
struct Ledger {
    NodeId owner;
    NodeId partner;
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_recv = 0;
    SimTime timestamp{0};

    // Mirror equality: my sent is your received and vice versa. Timestamps
    // are not compared.
    bool mirrors(const Ledger& theirs) const
    {
        return bytes_sent == theirs.bytes_recv && bytes_recv == theirs.bytes_sent;
    }
    bool zeroed() const { return bytes_sent == 0 && bytes_recv == 0; }
    void reset(SimTime now)
    {
        bytes_sent = bytes_recv = 0;
        timestamp = now;
    }

    Bytes encode() const;
    static Ledger decode(ByteView raw);
    bool operator==(const Ledger&) const = default;
};

// r = bytes_sent / (bytes_recv + 1)
double debt_ratio(const Ledger& ledger);
double debt_ratio(std::uint64_t bytes_sent, std::uint64_t bytes_recv);

// P(send | r) = 1 - 1 / (1 + exp(6 - 3r))
double send_probability(double r);

class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::string name() const = 0;
    // Probability of serving (or admitting) the partner of this ledger.
    virtual double send_probability(const Ledger& ledger) const = 0;
};

class SigmoidStrategy final : public Strategy {
public:
    std::string name() const override { return "sigmoid"; }
    double send_probability(const Ledger& ledger) const override
    {
        return bitswap::send_probability(debt_ratio(ledger));
    }
};

}  // namespace ipfs::bitswap
