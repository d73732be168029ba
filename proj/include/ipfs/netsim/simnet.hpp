#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <sodium.h>

#include "ipfs/common/bytes.hpp"
#include "ipfs/common/errors.hpp"
#include "ipfs/common/rng.hpp"
#include "ipfs/common/time.hpp"

namespace ipfs::netsim {

IPFS_DECLARE_ERROR(UnknownNode);

using Address = std::uint32_t;
using TimerId = std::uint64_t;

enum class Behavior { honest, drop_all, drop_queries, corrupt_blocks, ledger_amnesia };

std::string_view behavior_name(Behavior b);
Behavior parse_behavior(std::string_view name);

struct AdversaryPlan {
    Behavior behavior = Behavior::honest;
    double fraction = 0.0;  // in [0, 1]
};

// What the network knows about a frame without understanding it. Protocol
// layers install a classifier so traces and adversaries can see frame types.
struct FrameInfo {
    std::string type = "frame";
    bool query = false;                 // a request expecting a response
    std::size_t payload_offset = 0;     // block payload range, if any
    std::size_t payload_length = 0;
};

using FrameClassifier = std::function<FrameInfo(ByteView)>;

class Endpoint {
public:
    virtual ~Endpoint() = default;
    virtual void deliver(Address from, Bytes frame) = 0;
};

struct LinkParams {
    SimTime latency_min = 10ms;
    SimTime latency_max = 10ms;
    double drop = 0.0;
    std::uint64_t bytes_per_ms = 0;  // 0: no serialization delay
};

struct NetStats {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t corrupted = 0;
};

// Single-threaded discrete-event network. Events run in (time, sequence)
// order; all randomness comes from one seeded generator, so equal seeds and
// equal inputs give identical traces.
class SimNet {
public:
    explicit SimNet(std::uint64_t seed);
    SimNet(const SimNet&) = delete;
    SimNet& operator=(const SimNet&) = delete;

    Address attach(Endpoint* endpoint);
    void detach(Address addr);
    bool attached(Address addr) const;
    std::size_t node_count() const { return endpoints_.size(); }

    SimTime now() const { return now_; }
    Rng& rng() { return rng_; }

    // Frames on one directed link arrive in send order. Throws UnknownNode if
    // either side is not attached.
    void send(Address from, Address to, Bytes frame);

    // Background timers (periodic republish and the like) never keep
    // run_until_quiescent alive.
    TimerId schedule(SimTime delay, std::function<void()> fn, bool background = false);
    void cancel(TimerId id);

    void set_default_link(const LinkParams& params) { default_link_ = params; }
    void set_link(Address from, Address to, const LinkParams& params);
    const LinkParams& link(Address from, Address to) const;

    void set_behavior(Address addr, Behavior b);
    Behavior behavior(Address addr) const;
    // Marks round(fraction * candidates) of the non-excluded nodes, chosen by
    // the network rng. Returns them in ascending order.
    std::vector<Address> assign_adversaries(const AdversaryPlan& plan, const std::set<Address>& exclude = {});

    void set_classifier(FrameClassifier classifier) { classifier_ = std::move(classifier); }
    FrameInfo classify(ByteView frame) const;

    // Processes one event; false if the queue is empty.
    bool step();
    void run_until(SimTime t);
    // Runs until pred() holds or the clock would pass limit. Returns pred().
    bool run_until(const std::function<bool()>& pred, SimTime limit);
    // Runs until no foreground events remain (or limit is reached).
    void run_until_quiescent(SimTime limit = SimTime::max());
    bool quiescent() const { return foreground_pending_ == 0; }

    // Trace: `time TAB from TAB to TAB type TAB size` per delivered or dropped
    // frame. The digest covers every line whether or not lines are kept.
    void keep_trace_lines(bool keep) { keep_lines_ = keep; }
    const std::vector<std::string>& trace_lines() const { return lines_; }
    std::string trace_digest() const;
    const NetStats& stats() const { return stats_; }

private:
    // Pops cancelled events off the head so top() is the next live one.
    void drop_cancelled();
    struct Event {
        SimTime time;
        std::uint64_t seq;
        TimerId id;
        bool operator>(const Event& o) const { return std::tie(time, seq) > std::tie(o.time, o.seq); }
    };
    struct Pending {
        std::function<void()> fn;
        bool background;
    };
    struct LinkState {
        SimTime busy_until{0};
        SimTime last_arrival{0};
    };

    void record(Address from, Address to, const std::string& type, std::size_t size);
    void require(Address addr) const;

    Rng rng_;
    SimTime now_{0};
    std::uint64_t next_seq_ = 0;
    TimerId next_timer_ = 1;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::map<TimerId, Pending> pending_;
    std::size_t foreground_pending_ = 0;

    std::map<Address, Endpoint*> endpoints_;
    Address next_address_ = 1;
    std::map<Address, Behavior> behaviors_;
    LinkParams default_link_;
    std::map<std::pair<Address, Address>, LinkParams> links_;
    std::map<std::pair<Address, Address>, LinkState> link_state_;
    FrameClassifier classifier_;

    bool keep_lines_ = false;
    std::vector<std::string> lines_;
    crypto_hash_sha256_state trace_hash_;
    NetStats stats_;
};

}  // namespace ipfs::netsim
