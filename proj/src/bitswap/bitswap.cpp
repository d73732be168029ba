#include "ipfs/bitswap/bitswap.hpp"

#include <algorithm>

#include "ipfs/common/wire.hpp"

namespace ipfs::bitswap {

namespace {

constexpr std::uint8_t kCancelFlag = 0x01;
constexpr std::uint8_t kDepthFlag = 0x02;

Bytes open_signing_payload(bool reply, ByteView ledger)
{
    Writer w;
    w.string("bitswap-open").byte(reply ? 1 : 0).length_prefixed(ledger);
    return std::move(w).bytes();
}

}  // namespace

std::string_view state_name(SessionState s)
{
    switch (s) {
    case SessionState::closed: return "closed";
    case SessionState::opening: return "opening";
    case SessionState::open: return "open";
    case SessionState::ignored: return "ignored";
    }
    return "closed";
}

BitSwap::BitSwap(netsim::SimNet& net, Address addr, const identity::NodeIdentity& identity,
                 blockstore::BlockStore& store, BitSwapConfig config, std::shared_ptr<const Strategy> strategy)
    : net_(net), addr_(addr), identity_(identity), store_(store), config_(config), strategy_(std::move(strategy))
{
}

BitSwap::~BitSwap()
{
    for (auto& [_, s] : sessions_) {
        net_.cancel(s.open_timer);
        net_.cancel(s.ignore_timer);
        net_.cancel(s.silence_timer);
    }
    net_.cancel(readvertise_timer_);
}

netsim::FrameInfo BitSwap::describe(ByteView frame)
{
    netsim::FrameInfo info;
    if (frame.size() < 2 || frame[0] != kProtocol) return info;
    switch (frame[1]) {
    case kOpen: info.type = "bitswap.open"; break;
    case kWantList: info.type = "bitswap.want_list"; break;
    case kBlock: info.type = "bitswap.block"; break;
    case kBlockAck: info.type = "bitswap.block_ack"; break;
    case kClose: info.type = "bitswap.close"; break;
    default: info.type = "bitswap.unknown"; return info;
    }
    if (frame[1] == kBlock) {
        try {
            Reader r(frame);
            r.skip(2);
            r.length_prefixed();  // sender
            r.length_prefixed();  // key
            auto len = r.uvarint();
            info.payload_offset = r.offset();
            info.payload_length = static_cast<std::size_t>(std::min<std::uint64_t>(len, r.remaining()));
        } catch (const Error&) {
            info.payload_length = 0;
        }
    }
    return info;
}

// --- bookkeeping ---

PeerSession& BitSwap::session_for(const NodeId& id, Address addr)
{
    auto [it, inserted] = sessions_.try_emplace(id);
    auto& s = it->second;
    if (inserted) {
        s.id = id;
        s.first_seen = net_.now();
    }
    if (s.addr != addr) {
        if (s.addr) by_addr_.erase(s.addr);
        s.addr = addr;
        by_addr_[addr] = id;
    }
    return s;
}

Ledger& BitSwap::ledger_for(const NodeId& peer)
{
    auto [it, inserted] = ledgers_.try_emplace(peer);
    if (inserted) {
        it->second.owner = self();
        it->second.partner = peer;
        it->second.timestamp = net_.now();
    }
    return it->second;
}

const Ledger* BitSwap::ledger(const NodeId& peer) const
{
    auto it = ledgers_.find(peer);
    return it == ledgers_.end() ? nullptr : &it->second;
}

Ledger BitSwap::ledger_or_zero(const NodeId& peer) const
{
    if (auto* l = ledger(peer)) return *l;
    Ledger l;
    l.owner = self();
    l.partner = peer;
    return l;
}

const PeerSession* BitSwap::session(const NodeId& peer) const
{
    auto it = sessions_.find(peer);
    return it == sessions_.end() ? nullptr : &it->second;
}

std::vector<NodeId> BitSwap::peers() const
{
    std::vector<NodeId> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
}

double BitSwap::ignored_fraction(const NodeId& peer) const
{
    auto* s = session(peer);
    if (!s) return 0.0;
    auto observed = net_.now() - s->first_seen;
    if (observed <= SimTime(0)) return 0.0;
    auto ignored = s->ignored_total;
    if (s->state == SessionState::ignored) ignored += net_.now() - s->ignored_since;
    return static_cast<double>(ignored.count()) / static_cast<double>(observed.count());
}

std::uint64_t BitSwap::draws(const NodeId& peer) const
{
    auto* s = session(peer);
    return s ? s->draws : 0;
}

std::size_t BitSwap::rarity(const Multihash& key) const
{
    std::size_t n = 0;
    if (auto it = holders_.find(key); it != holders_.end()) n += it->second.size();
    if (auto it = provider_counts_.find(key); it != provider_counts_.end()) n += it->second;
    return n;
}

// --- sending ---

void BitSwap::send(PeerSession& s, std::uint8_t tag, ByteView body)
{
    Writer w;
    w.byte(kProtocol).byte(tag).length_prefixed(self().encode()).raw(body);
    net_.send(addr_, s.addr, std::move(w).bytes());
}

void BitSwap::send_open(PeerSession& s, bool reply)
{
    auto& mine = ledger_for(s.id);
    if (config_.ledger_amnesia || net_.behavior(addr_) == netsim::Behavior::ledger_amnesia) mine.reset(net_.now());
    auto ledger_bytes = mine.encode();
    Writer w;
    w.byte(reply ? 1 : 0)
        .length_prefixed(identity_.public_key())
        .length_prefixed(ledger_bytes)
        .length_prefixed(identity_.sign_raw(open_signing_payload(reply, ledger_bytes)));
    send(s, kOpen, w.bytes());
}

void BitSwap::send_close(PeerSession& s, bool final)
{
    Bytes body{static_cast<std::uint8_t>(final ? 1 : 0)};
    send(s, kClose, body);
}

void BitSwap::touch(PeerSession& s)
{
    s.last_seen = net_.now();
    net_.cancel(s.silence_timer);
    s.silence_timer = 0;
    if (s.state != SessionState::open && s.state != SessionState::opening) return;
    auto id = s.id;
    s.silence_timer = net_.schedule(
        config_.silence_wait,
        [this, id] {
            auto& s = sessions_.at(id);
            s.silence_timer = 0;
            if (s.state != SessionState::open && s.state != SessionState::opening) return;
            send_close(s, false);
            close_session(s);
        },
        true);
}

// --- lifecycle ---

void BitSwap::connect(const NodeId& peer, Address addr)
{
    if (shut_down_ || peer == self()) return;
    auto& s = session_for(peer, addr);
    if (s.banned) return;
    s.open_attempts = 0;
    begin_open(s);
}

void BitSwap::begin_open(PeerSession& s)
{
    if (shut_down_ || s.banned) return;
    if (s.state == SessionState::open || s.state == SessionState::opening || s.state == SessionState::ignored) return;
    if (!s.in_flight.empty()) {
        // Opening compares ledgers; wait until every block we sent is
        // acknowledged so both sides count the same bytes.
        s.reopen_pending = true;
        return;
    }
    s.reopen_pending = false;
    s.state = SessionState::opening;
    ++s.open_attempts;
    send_open(s, false);
    touch(s);
    auto id = s.id;
    net_.cancel(s.open_timer);
    s.open_timer = net_.schedule(config_.open_retry, [this, id] {
        auto& s = sessions_.at(id);
        s.open_timer = 0;
        if (s.state != SessionState::opening) return;
        s.state = SessionState::closed;
        if (s.open_attempts < config_.open_attempts) begin_open(s);
    });
}

void BitSwap::become_open(PeerSession& s)
{
    net_.cancel(s.open_timer);
    s.open_timer = 0;
    s.open_attempts = 0;
    s.state = SessionState::open;
    touch(s);
    send_full_wants(s);
    schedule_readvertise();
    service(s);
}

void BitSwap::enter_ignored(PeerSession& s)
{
    s.state = SessionState::ignored;
    s.ignored_since = net_.now();
    s.until = net_.now() + config_.ignore_cooldown;
    net_.cancel(s.open_timer);
    net_.cancel(s.silence_timer);
    s.open_timer = s.silence_timer = 0;
    auto id = s.id;
    s.ignore_timer = net_.schedule(config_.ignore_cooldown, [this, id] {
        auto& s = sessions_.at(id);
        s.ignore_timer = 0;
        if (s.state != SessionState::ignored) return;
        // Cooldown over: force the peer to re-open so want lists resync.
        close_session(s);
        send_close(s, false);
        if (wants_anything()) begin_open(s);
    });
}

void BitSwap::close_session(PeerSession& s)
{
    if (s.state == SessionState::ignored) s.ignored_total += net_.now() - s.ignored_since;
    net_.cancel(s.open_timer);
    net_.cancel(s.ignore_timer);
    net_.cancel(s.silence_timer);
    s.open_timer = s.ignore_timer = s.silence_timer = 0;
    s.state = SessionState::closed;
    s.want_list.clear();
    s.advertised.clear();
}

void BitSwap::shutdown()
{
    for (auto& [_, s] : sessions_) {
        if (s.state != SessionState::closed) send_close(s, true);
        close_session(s);
    }
    net_.cancel(readvertise_timer_);
    readvertise_timer_ = 0;
    shut_down_ = true;
}

Decision BitSwap::decide_send(PeerSession& s)
{
    ++s.draws;
    double p = strategy_->send_probability(ledger_for(s.id));
    if (net_.rng().bernoulli(p)) return Decision::send;
    enter_ignored(s);
    return Decision::ignore;
}

// --- frame handling ---

void BitSwap::handle_frame(Address from, ByteView frame)
{
    if (shut_down_) return;
    std::uint8_t tag = 0;
    NodeId sender;
    Bytes body;
    try {
        Reader r(frame);
        if (r.byte() != kProtocol) return;
        tag = r.byte();
        sender = Multihash::decode(r.length_prefixed());
        auto rest = r.rest();
        body.assign(rest.begin(), rest.end());
    } catch (const Error&) {
        return;
    }
    if (sender == self()) return;

    if (tag == kOpen) {
        // Authenticate before any state is created for the sender.
        try {
            Reader r(body);
            r.byte();
            auto pk = r.length_prefixed();
            auto ledger_bytes = r.length_prefixed();
            auto sig = r.length_prefixed();
            r.expect_done("open");
            if (!identity::verify_peer(sender, pk, config_.difficulty)) return;
            bool reply = body[0] != 0;
            if (!identity::verify_raw(pk, open_signing_payload(reply, ledger_bytes), sig)) return;
        } catch (const Error&) {
            return;
        }
        on_open(session_for(sender, from), body);
        return;
    }

    auto known = by_addr_.find(from);
    if (known == by_addr_.end() || known->second != sender) return;
    auto& s = sessions_.at(sender);
    try {
        switch (tag) {
        case kWantList: on_want_list(s, body); break;
        case kBlock: on_block_frame(s, body); break;
        case kBlockAck: on_ack(s, body); break;
        case kClose: on_close(s, body); break;
        default: break;
        }
    } catch (const DecodeError&) {
        // Malformed frame: dropped.
    } catch (const TruncatedError&) {
    } catch (const multiformats::LengthMismatch&) {
    } catch (const multiformats::RegistryError&) {
    }
}

void BitSwap::on_open(PeerSession& s, ByteView body)
{
    Reader r(body);
    bool reply = r.byte() != 0;
    r.length_prefixed();
    Ledger theirs;
    try {
        theirs = Ledger::decode(r.length_prefixed());
    } catch (const Error&) {
        send_close(s, true);
        close_session(s);
        return;
    }
    if (theirs.owner != s.id || theirs.partner != self()) {
        send_close(s, true);
        close_session(s);
        return;
    }
    if (s.banned) {
        send_close(s, true);
        return;
    }
    if (s.state == SessionState::ignored) return;  // nothing but time ends an ignore
    s.last_seen = net_.now();
    auto& mine = ledger_for(s.id);

    if (!reply) {
        // A lost ledger is settled first, so admission judges the terms the
        // session would actually run on.
        if (!mine.mirrors(theirs)) {
            bool debtor_forgot = mine.bytes_sent > mine.bytes_recv;
            if (config_.mismatch == MismatchPolicy::refuse_if_debtor && debtor_forgot) {
                s.banned = true;
                send_close(s, true);
                close_session(s);
                return;
            }
            mine.reset(net_.now());
        }
        // Admission uses the same strategy as sending. Opens that cross ours
        // skip it: we already chose this session, and our want list must
        // reach the peer or a debtor can never repay.
        if (s.state != SessionState::opening && decide_send(s) == Decision::ignore) return;
        send_open(s, true);
        become_open(s);
        return;
    }

    if (s.state != SessionState::opening && s.state != SessionState::open) return;
    if (!mine.mirrors(theirs)) {
        mine.reset(net_.now());
        send_open(s, true);
    }
    if (s.state == SessionState::opening) become_open(s);
}

void BitSwap::on_want_list(PeerSession& s, ByteView body)
{
    if (s.state == SessionState::ignored) return;
    if (s.state != SessionState::open) {
        if (s.state == SessionState::closed) send_close(s, false);
        return;
    }
    touch(s);
    Reader r(body);
    bool full = r.byte() != 0;
    if (full) s.want_list.clear();
    for (auto n = r.uvarint(); n > 0; --n) {
        auto flags = r.byte();
        auto key = Multihash::decode(r.length_prefixed());
        if (flags & kCancelFlag)
            s.want_list.erase(key);
        else if (s.want_list.size() < config_.want_capacity || s.want_list.count(key))
            s.want_list[key] = WantEntry{(flags & kDepthFlag) != 0};
    }
    r.expect_done("want list");
    update_work();
    service(s);
}

void BitSwap::on_block_frame(PeerSession& s, ByteView body)
{
    Reader r(body);
    auto key = Multihash::decode(r.length_prefixed());
    auto data = r.length_prefixed();
    r.expect_done("block");
    if (s.state == SessionState::open) touch(s);

    auto ack = [&](bool ok) {
        Writer w;
        w.length_prefixed(key.encode()).byte(ok ? 1 : 0);
        send(s, kBlockAck, w.bytes());
    };

    bool needed = (need_set_.count(key) || work_.count(key)) && !store_.has(key);
    if (!needed) {
        ++stats_.duplicate_blocks;
        ack(false);
    } else if (!key.verify(data)) {
        // Corrupt or forged: no credit, and the sender loses our trust.
        ++stats_.bad_blocks;
        ++s.bad_blocks;
        ack(false);
        if (config_.refuse_after_bad_block) {
            s.banned = true;
            send_close(s, true);
            close_session(s);
        }
        return;
    } else {
        store_.put_keyed(key, data);
        bool was_work = work_.erase(key) != 0;
        if (need_set_.erase(key)) need_order_.erase(std::find(need_order_.begin(), need_order_.end(), key));
        auto& ledger = ledger_for(s.id);
        ledger.bytes_recv += data.size();
        ledger.timestamp = net_.now();
        ack(true);
        holders_[key].insert(s.id);
        ++s.blocks_recv;
        ++stats_.blocks_received;
        stats_.bytes_received += data.size();
        if (was_work) ++stats_.work_fetched;
        if (on_block_) on_block_(key, data);
        refresh_wants();
        for (auto& [_, other] : sessions_)
            if (other.want_list.count(key)) service(other);
    }
    // Block on a connection that is not active: used if good, but the
    // sender is told to re-initialise.
    if (s.state == SessionState::closed) send_close(s, false);
}

void BitSwap::on_ack(PeerSession& s, ByteView body)
{
    Reader r(body);
    auto key = Multihash::decode(r.length_prefixed());
    bool ok = r.byte() != 0;
    r.expect_done("block ack");
    if (s.state == SessionState::open) touch(s);
    auto it = s.in_flight.find(key);
    if (it == s.in_flight.end()) return;
    if (ok) {
        auto& ledger = ledger_for(s.id);
        ledger.bytes_sent += it->second;
        ledger.timestamp = net_.now();
        holders_[key].insert(s.id);
    }
    s.in_flight.erase(it);
    s.want_list.erase(key);
    if (s.in_flight.empty() && s.reopen_pending) begin_open(s);
    service(s);
}

void BitSwap::on_close(PeerSession& s, ByteView body)
{
    Reader r(body);
    bool final = r.byte() != 0;
    r.expect_done("close");
    if (s.state == SessionState::ignored) return;
    close_session(s);
    if (!final && wants_anything()) begin_open(s);
}

// --- want lists ---

std::map<Multihash, bool> BitSwap::desired_wants() const
{
    std::map<Multihash, bool> out;
    for (const auto& key : need_order_) {
        if (out.size() >= config_.want_capacity) return out;
        out.emplace(key, false);
    }
    // Work for peers only while our own needs are met.
    if (need_order_.empty())
        for (const auto& key : work_) {
            if (out.size() >= config_.want_capacity) break;
            out.emplace(key, true);
        }
    return out;
}

void BitSwap::send_full_wants(PeerSession& s)
{
    auto desired = desired_wants();
    Writer w;
    w.byte(1).uvarint(desired.size());
    for (const auto& [key, depth] : desired) w.byte(depth ? kDepthFlag : 0).length_prefixed(key.encode());
    send(s, kWantList, w.bytes());
    s.advertised = std::move(desired);
}

void BitSwap::refresh_wants()
{
    auto desired = desired_wants();
    for (auto& [_, s] : sessions_) {
        if (s.state != SessionState::open) continue;
        std::vector<std::pair<Multihash, std::uint8_t>> delta;
        for (const auto& [key, depth] : s.advertised)
            if (!desired.count(key)) delta.emplace_back(key, kCancelFlag);
        for (const auto& [key, depth] : desired) {
            auto it = s.advertised.find(key);
            if (it == s.advertised.end() || it->second != depth)
                delta.emplace_back(key, depth ? kDepthFlag : 0);
        }
        if (delta.empty()) continue;
        Writer w;
        w.byte(0).uvarint(delta.size());
        for (const auto& [key, flags] : delta) w.byte(flags).length_prefixed(key.encode());
        send(s, kWantList, w.bytes());
        s.advertised = desired;
    }
}

void BitSwap::want(const std::vector<Multihash>& keys)
{
    bool changed = false;
    for (const auto& key : keys) {
        if (store_.has(key) || need_set_.count(key)) continue;
        need_set_.insert(key);
        need_order_.push_back(key);
        work_.erase(key);
        changed = true;
    }
    if (!changed) return;
    refresh_wants();
    schedule_readvertise();
}

void BitSwap::cancel(const Multihash& key)
{
    if (!need_set_.erase(key)) return;
    need_order_.erase(std::find(need_order_.begin(), need_order_.end(), key));
    refresh_wants();
}

void BitSwap::update_work()
{
    if (!config_.work_for_peers) return;
    std::set<Multihash> wanted;
    for (const auto& [_, s] : sessions_) {
        if (s.state != SessionState::open) continue;
        for (const auto& [key, entry] : s.want_list)
            if (!entry.depth && !store_.has(key) && !need_set_.count(key)) wanted.insert(key);
    }
    std::set<Multihash> next;
    if (need_order_.empty()) next = wanted;
    else
        for (const auto& key : work_)
            if (wanted.count(key)) next.insert(key);
    if (next == work_) return;
    work_ = std::move(next);
    refresh_wants();
    if (!work_.empty()) schedule_readvertise();
}

void BitSwap::schedule_readvertise()
{
    if (readvertise_timer_ || shut_down_) return;
    auto delay = SimTime(net_.rng().uniform_range(config_.readvertise_min.count(), config_.readvertise_max.count()));
    readvertise_timer_ = net_.schedule(
        delay,
        [this] {
            readvertise_timer_ = 0;
            if (!wants_anything()) return;
            for (auto& [_, s] : sessions_)
                if (s.state == SessionState::open) send_full_wants(s);
            schedule_readvertise();
        },
        true);
}

// --- serving ---

void BitSwap::service(PeerSession& s)
{
    if (shut_down_ || config_.free_rider || s.state != SessionState::open) return;
    while (s.in_flight.size() < config_.window) {
        const Multihash* best = nullptr;
        std::size_t best_rarity = 0;
        for (const auto& [key, entry] : s.want_list) {
            if (s.in_flight.count(key) || !store_.has(key)) continue;
            auto r = rarity(key);
            if (!best || r < best_rarity) {
                best = &key;
                best_rarity = r;
            }
        }
        if (!best) return;
        auto key = *best;
        std::optional<Bytes> bytes;
        try {
            bytes = store_.get(key);
        } catch (const blockstore::IntegrityError&) {
            bytes.reset();
        }
        if (!bytes) {
            s.want_list.erase(key);
            continue;
        }
        if (decide_send(s) == Decision::ignore) return;
        Writer w;
        w.length_prefixed(key.encode()).length_prefixed(*bytes);
        s.in_flight[key] = bytes->size();
        ++s.blocks_sent;
        ++stats_.blocks_sent;
        send(s, kBlock, w.bytes());
    }
}

}  // namespace ipfs::bitswap
