#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "ipfs/bitswap/strategy.hpp"
#include "ipfs/blockstore/blockstore.hpp"
#include "ipfs/netsim/simnet.hpp"

namespace ipfs::bitswap {

using multiformats::Multihash;
using netsim::Address;

enum class MismatchPolicy {
    reinitialize,      // zero both ledgers and trade on
    refuse_if_debtor,  // treat a lost ledger that erased debt as misconduct
};

struct BitSwapConfig {
    SimTime ignore_cooldown = std::chrono::seconds(10);
    SimTime silence_wait = std::chrono::seconds(30);
    SimTime readvertise_min = std::chrono::seconds(25);
    SimTime readvertise_max = std::chrono::seconds(35);
    SimTime open_retry = std::chrono::seconds(5);
    int open_attempts = 6;
    std::size_t window = 8;            // unacknowledged blocks per peer
    std::size_t want_capacity = 256;   // entries advertised / accepted per peer
    MismatchPolicy mismatch = MismatchPolicy::reinitialize;
    bool refuse_after_bad_block = true;
    bool work_for_peers = true;
    bool free_rider = false;           // never uploads blocks
    bool ledger_amnesia = false;       // presents a zeroed ledger on open
    int difficulty = 0;                // puzzle bits required of peers
};

enum class SessionState { closed, opening, open, ignored };

std::string_view state_name(SessionState s);

struct WantEntry {
    bool depth = false;  // wanted on behalf of one of the peer's peers
};

struct PeerSession {
    NodeId id;
    Address addr = 0;
    SessionState state = SessionState::closed;
    SimTime until{0};
    SimTime last_seen{0};
    std::map<Multihash, WantEntry> want_list;   // what the peer wants
    std::map<Multihash, bool> advertised;       // what we told the peer we want
    std::map<Multihash, std::uint64_t> in_flight;  // sent, awaiting ack
    bool reopen_pending = false;
    bool banned = false;
    int open_attempts = 0;
    netsim::TimerId open_timer = 0;
    netsim::TimerId ignore_timer = 0;
    netsim::TimerId silence_timer = 0;
    SimTime ignored_since{0};

    // Statistics.
    SimTime first_seen{0};
    SimTime ignored_total{0};
    std::uint64_t draws = 0;
    std::uint64_t blocks_sent = 0;
    std::uint64_t blocks_recv = 0;
    std::uint64_t bad_blocks = 0;
};

// Result of one strategy evaluation for a peer.
enum class Decision { send, ignore };

struct BitSwapStats {
    std::uint64_t blocks_received = 0;
    std::uint64_t bytes_received = 0;
    std::uint64_t duplicate_blocks = 0;
    std::uint64_t bad_blocks = 0;
    std::uint64_t blocks_sent = 0;
    std::uint64_t work_fetched = 0;
};

// Block exchange engine for one node. All state changes happen inside
// network event handlers or direct calls from the owner; it never blocks.
class BitSwap {
public:
    static constexpr std::uint8_t kProtocol = 0x02;

    BitSwap(netsim::SimNet& net, Address addr, const identity::NodeIdentity& identity,
            blockstore::BlockStore& store, BitSwapConfig config = {},
            std::shared_ptr<const Strategy> strategy = std::make_shared<SigmoidStrategy>());
    ~BitSwap();
    BitSwap(const BitSwap&) = delete;
    BitSwap& operator=(const BitSwap&) = delete;

    void handle_frame(Address from, ByteView frame);
    static netsim::FrameInfo describe(ByteView frame);

    // Opens (or re-opens) a session with a peer.
    void connect(const NodeId& peer, Address addr);
    // Adds keys to the need list unless already held; re-advertises.
    void want(const std::vector<Multihash>& keys);
    void cancel(const Multihash& key);
    // Sends close(true) to every session.
    void shutdown();

    // Called for every verified block that entered the store.
    void on_block(std::function<void(const Multihash&, ByteView)> hook) { on_block_ = std::move(hook); }
    // Providers learnt from routing count towards rarity.
    void note_providers(const Multihash& key, std::size_t count) { provider_counts_[key] = count; }

    bool needs(const Multihash& key) const { return need_set_.count(key) != 0; }
    const std::vector<Multihash>& need_list() const { return need_order_; }
    const std::set<Multihash>& work_list() const { return work_; }
    bool has(const Multihash& key) const { return store_.has(key); }

    const Ledger* ledger(const NodeId& peer) const;
    const PeerSession* session(const NodeId& peer) const;
    std::vector<NodeId> peers() const;
    // Ledger of any peer, zeroed if none exists yet.
    Ledger ledger_or_zero(const NodeId& peer) const;
    // Fraction of observed time this peer's session spent ignored.
    double ignored_fraction(const NodeId& peer) const;
    std::uint64_t draws(const NodeId& peer) const;
    const BitSwapStats& stats() const { return stats_; }
    std::size_t rarity(const Multihash& key) const;

    const BitSwapConfig& config() const { return config_; }
    const NodeId& self() const { return identity_.node_id(); }

    // Strategy evaluation; on failure the peer is ignored for the cooldown.
    Decision decide_send(PeerSession& session);

private:
    enum Tag : std::uint8_t { kOpen = 1, kWantList = 2, kBlock = 3, kBlockAck = 4, kClose = 5 };

    PeerSession& session_for(const NodeId& id, Address addr);
    Ledger& ledger_for(const NodeId& peer);
    void send(PeerSession& s, std::uint8_t tag, ByteView body);
    void send_open(PeerSession& s, bool reply);
    void send_close(PeerSession& s, bool final);
    void begin_open(PeerSession& s);
    void become_open(PeerSession& s);
    void enter_ignored(PeerSession& s);
    void close_session(PeerSession& s);
    void touch(PeerSession& s);

    void on_open(PeerSession& s, ByteView body);
    void on_want_list(PeerSession& s, ByteView body);
    void on_block_frame(PeerSession& s, ByteView body);
    void on_ack(PeerSession& s, ByteView body);
    void on_close(PeerSession& s, ByteView body);

    std::map<Multihash, bool> desired_wants() const;
    void send_full_wants(PeerSession& s);
    void refresh_wants();
    void service(PeerSession& s);
    void update_work();
    void schedule_readvertise();
    bool wants_anything() const { return !need_order_.empty() || !work_.empty(); }

    netsim::SimNet& net_;
    Address addr_;
    identity::NodeIdentity identity_;
    blockstore::BlockStore& store_;
    BitSwapConfig config_;
    std::shared_ptr<const Strategy> strategy_;

    std::map<NodeId, Ledger> ledgers_;
    std::map<NodeId, PeerSession> sessions_;
    std::map<Address, NodeId> by_addr_;

    std::vector<Multihash> need_order_;
    std::set<Multihash> need_set_;
    std::set<Multihash> work_;
    std::map<Multihash, std::set<NodeId>> holders_;
    std::map<Multihash, std::size_t> provider_counts_;

    netsim::TimerId readvertise_timer_ = 0;
    std::function<void(const Multihash&, ByteView)> on_block_;
    BitSwapStats stats_;
    bool shut_down_ = false;
};

}  // namespace ipfs::bitswap
