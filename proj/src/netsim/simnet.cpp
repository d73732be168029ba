#include "ipfs/netsim/simnet.hpp"

#include <algorithm>
#include <cmath>

namespace ipfs::netsim {

std::string_view behavior_name(Behavior b)
{
    switch (b) {
    case Behavior::honest: return "honest";
    case Behavior::drop_all: return "drop_all";
    case Behavior::drop_queries: return "drop_queries";
    case Behavior::corrupt_blocks: return "corrupt_blocks";
    case Behavior::ledger_amnesia: return "ledger_amnesia";
    }
    return "honest";
}

Behavior parse_behavior(std::string_view name)
{
    for (auto b : {Behavior::honest, Behavior::drop_all, Behavior::drop_queries, Behavior::corrupt_blocks,
                   Behavior::ledger_amnesia})
        if (behavior_name(b) == name) return b;
    throw std::invalid_argument("unknown adversary behavior: " + std::string(name));
}

SimNet::SimNet(std::uint64_t seed) : rng_(seed)
{
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
    crypto_hash_sha256_init(&trace_hash_);
}

Address SimNet::attach(Endpoint* endpoint)
{
    Address addr = next_address_++;
    endpoints_[addr] = endpoint;
    return addr;
}

void SimNet::detach(Address addr) { endpoints_.erase(addr); }

bool SimNet::attached(Address addr) const { return endpoints_.count(addr) != 0; }

void SimNet::require(Address addr) const
{
    if (!attached(addr)) throw UnknownNode("no node at address " + std::to_string(addr));
}

void SimNet::set_link(Address from, Address to, const LinkParams& params) { links_[{from, to}] = params; }

const LinkParams& SimNet::link(Address from, Address to) const
{
    auto it = links_.find({from, to});
    return it == links_.end() ? default_link_ : it->second;
}

void SimNet::set_behavior(Address addr, Behavior b)
{
    if (b == Behavior::honest)
        behaviors_.erase(addr);
    else
        behaviors_[addr] = b;
}

Behavior SimNet::behavior(Address addr) const
{
    auto it = behaviors_.find(addr);
    return it == behaviors_.end() ? Behavior::honest : it->second;
}

std::vector<Address> SimNet::assign_adversaries(const AdversaryPlan& plan, const std::set<Address>& exclude)
{
    if (plan.fraction < 0.0 || plan.fraction > 1.0) throw std::invalid_argument("adversary fraction outside [0,1]");
    std::vector<Address> candidates;
    for (const auto& [addr, _] : endpoints_)
        if (!exclude.count(addr)) candidates.push_back(addr);
    auto count = static_cast<std::size_t>(std::llround(plan.fraction * static_cast<double>(candidates.size())));
    // Partial Fisher-Yates driven by our own rng for portability.
    for (std::size_t i = 0; i < count; ++i) {
        auto j = i + rng_.uniform(candidates.size() - i);
        std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(count);
    std::sort(candidates.begin(), candidates.end());
    for (auto addr : candidates) set_behavior(addr, plan.behavior);
    return candidates;
}

FrameInfo SimNet::classify(ByteView frame) const
{
    if (classifier_) return classifier_(frame);
    return {};
}

void SimNet::send(Address from, Address to, Bytes frame)
{
    require(from);
    require(to);
    ++stats_.sent;
    auto info = classify(frame);
    const auto& params = link(from, to);

    bool drop = behavior(from) == Behavior::drop_all || behavior(to) == Behavior::drop_all ||
                (behavior(to) == Behavior::drop_queries && info.query);
    // Only draw when the link is lossy, so adding lossless links never shifts
    // the random stream of other experiments.
    if (!drop && params.drop > 0.0) drop = rng_.bernoulli(params.drop);
    if (drop) {
        ++stats_.dropped;
        record(from, to, "drop:" + info.type, frame.size());
        return;
    }

    if (behavior(from) == Behavior::corrupt_blocks && info.payload_length > 0 &&
        info.payload_offset + info.payload_length <= frame.size()) {
        auto pos = info.payload_offset + rng_.uniform(info.payload_length);
        frame[pos] ^= static_cast<std::uint8_t>(1u << rng_.uniform(8));
        ++stats_.corrupted;
    }

    auto& state = link_state_[{from, to}];
    SimTime start = std::max(now_, state.busy_until);
    SimTime tx{0};
    if (params.bytes_per_ms > 0)
        tx = SimTime((frame.size() * 1000 + params.bytes_per_ms - 1) / params.bytes_per_ms);
    state.busy_until = start + tx;
    SimTime latency = params.latency_min;
    if (params.latency_max > params.latency_min)
        latency = SimTime(rng_.uniform_range(params.latency_min.count(), params.latency_max.count()));
    SimTime arrival = std::max(state.busy_until + latency, state.last_arrival);
    state.last_arrival = arrival;

    auto type = std::move(info.type);
    schedule(arrival - now_, [this, from, to, type = std::move(type), frame = std::move(frame)]() mutable {
        auto it = endpoints_.find(to);
        if (it == endpoints_.end()) {
            ++stats_.dropped;
            record(from, to, "drop:" + type, frame.size());
            return;
        }
        ++stats_.delivered;
        record(from, to, type, frame.size());
        it->second->deliver(from, std::move(frame));
    });
}

TimerId SimNet::schedule(SimTime delay, std::function<void()> fn, bool background)
{
    if (delay < SimTime(0)) delay = SimTime(0);
    TimerId id = next_timer_++;
    pending_.emplace(id, Pending{std::move(fn), background});
    if (!background) ++foreground_pending_;
    queue_.push(Event{now_ + delay, next_seq_++, id});
    return id;
}

void SimNet::cancel(TimerId id)
{
    auto it = pending_.find(id);
    if (it == pending_.end()) return;
    if (!it->second.background) --foreground_pending_;
    pending_.erase(it);
}

void SimNet::drop_cancelled()
{
    while (!queue_.empty() && !pending_.count(queue_.top().id)) queue_.pop();
}

bool SimNet::step()
{
    drop_cancelled();
    if (queue_.empty()) return false;
    auto ev = queue_.top();
    queue_.pop();
    auto it = pending_.find(ev.id);
    auto pending = std::move(it->second);
    pending_.erase(it);
    if (!pending.background) --foreground_pending_;
    now_ = ev.time;
    pending.fn();
    return true;
}

void SimNet::run_until(SimTime t)
{
    for (drop_cancelled(); !queue_.empty() && queue_.top().time <= t; drop_cancelled()) step();
    if (now_ < t) now_ = t;
}

bool SimNet::run_until(const std::function<bool()>& pred, SimTime limit)
{
    while (!pred()) {
        drop_cancelled();
        if (queue_.empty() || queue_.top().time > limit) return pred();
        step();
    }
    return true;
}

void SimNet::run_until_quiescent(SimTime limit)
{
    for (drop_cancelled(); foreground_pending_ > 0 && !queue_.empty() && queue_.top().time <= limit; drop_cancelled())
        step();
}

void SimNet::record(Address from, Address to, const std::string& type, std::size_t size)
{
    std::string line = std::to_string(now_.count()) + "\t" + std::to_string(from) + "\t" + std::to_string(to) +
                       "\t" + type + "\t" + std::to_string(size);
    crypto_hash_sha256_update(&trace_hash_, reinterpret_cast<const unsigned char*>(line.data()), line.size());
    crypto_hash_sha256_update(&trace_hash_, reinterpret_cast<const unsigned char*>("\n"), 1);
    if (keep_lines_) lines_.push_back(std::move(line));
}

std::string SimNet::trace_digest() const
{
    auto copy = trace_hash_;
    std::uint8_t out[crypto_hash_sha256_BYTES];
    crypto_hash_sha256_final(&copy, out);
    return to_hex(ByteView(out, sizeof out));
}

}  // namespace ipfs::netsim
