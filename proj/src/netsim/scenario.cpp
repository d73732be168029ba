#include "ipfs/netsim/scenario.hpp"

#include <sstream>

namespace ipfs::netsim {

namespace {

std::pair<SimTime, SimTime> parse_latency(const std::string& text)
{
    auto dots = text.find("..");
    if (dots == std::string::npos) {
        auto t = parse_duration(text);
        return {t, t};
    }
    auto lo = parse_duration(text.substr(0, dots));
    auto hi = parse_duration(text.substr(dots + 2));
    if (hi < lo) throw ConfigError("latency range is reversed: " + text);
    return {lo, hi};
}

std::string format_double(double v)
{
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

ScenarioConfig ScenarioConfig::from_config(const KeyValueConfig& cfg)
{
    ScenarioConfig sc;
    sc.raw = cfg;
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    auto nodes = cfg.get_int("nodes", 1);
    if (nodes < 1) throw ConfigError("nodes must be at least 1");
    sc.nodes = static_cast<std::size_t>(nodes);
    sc.difficulty = static_cast<int>(cfg.get_int("difficulty", 0));
    auto bootstrap = cfg.get_int("bootstrap", 4);
    if (bootstrap < 0) throw ConfigError("bootstrap must be non-negative");
    sc.bootstrap = static_cast<std::size_t>(bootstrap);
    try {
        if (auto lat = cfg.get("latency")) std::tie(sc.link.latency_min, sc.link.latency_max) = parse_latency(*lat);
        if (auto h = cfg.get("horizon")) sc.horizon = parse_duration(*h);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    auto bw = cfg.get_int("bandwidth", 0);
    if (bw < 0) throw ConfigError("bandwidth must be non-negative");
    sc.link.bytes_per_ms = static_cast<std::uint64_t>(bw);
    sc.link.drop = cfg.get_double("drop", 0.0);
    if (sc.link.drop < 0.0 || sc.link.drop > 1.0) throw ConfigError("drop rate outside [0,1]");

    for (const auto& [key, value] : cfg.entries()) {
        if (key.rfind("drop.", 0) != 0) continue;
        std::size_t a = 0, b = 0;
        char dot = 0;
        std::istringstream in(key.substr(5));
        if (!(in >> a >> dot >> b) || dot != '.' || !in.eof())
            throw ConfigError("bad per-link drop key: " + key);
        double rate = cfg.get_double(key, 0.0);
        if (rate < 0.0 || rate > 1.0) throw ConfigError("drop rate outside [0,1]: " + key);
        sc.drops[{a, b}] = rate;
    }

    if (auto adv = cfg.get("adversary")) {
        std::istringstream in(*adv);
        std::string name;
        double fraction = 0;
        if (!(in >> name >> fraction)) throw ConfigError("adversary must be '<behavior> <fraction>'");
        if (fraction < 0.0 || fraction > 1.0) throw ConfigError("adversary fraction outside [0,1]");
        try {
            sc.adversary = AdversaryPlan{parse_behavior(name), fraction};
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return sc;
}

KeyValueConfig ScenarioConfig::to_config() const
{
    KeyValueConfig cfg = raw;
    cfg.set("seed", std::to_string(seed));
    cfg.set("nodes", std::to_string(nodes));
    cfg.set("difficulty", std::to_string(difficulty));
    cfg.set("bootstrap", std::to_string(bootstrap));
    cfg.set("latency", link.latency_min == link.latency_max
                           ? format_duration(link.latency_min)
                           : format_duration(link.latency_min) + ".." + format_duration(link.latency_max));
    cfg.set("bandwidth", std::to_string(link.bytes_per_ms));
    cfg.set("drop", format_double(link.drop));
    for (const auto& [ab, rate] : drops)
        cfg.set("drop." + std::to_string(ab.first) + "." + std::to_string(ab.second), format_double(rate));
    if (adversary)
        cfg.set("adversary", std::string(behavior_name(adversary->behavior)) + " " + format_double(adversary->fraction));
    cfg.set("horizon", format_duration(horizon));
    return cfg;
}

void ScenarioConfig::apply_links(SimNet& net, const std::vector<Address>& addresses) const
{
    net.set_default_link(link);
    for (const auto& [ab, rate] : drops) {
        if (ab.first >= addresses.size() || ab.second >= addresses.size())
            throw ConfigError("per-link drop refers to a node index beyond the node count");
        auto params = link;
        params.drop = rate;
        net.set_link(addresses[ab.first], addresses[ab.second], params);
    }
}

}  // namespace ipfs::netsim
