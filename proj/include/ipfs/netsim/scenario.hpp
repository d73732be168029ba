#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ipfs/common/kv_config.hpp"
#include "ipfs/netsim/simnet.hpp"

namespace ipfs::netsim {

// Scenario file (key = value):
//   seed = 7
//   nodes = 64
//   difficulty = 0
//   bootstrap = 4            # random existing peers each new node pings
//   latency = 10ms           # or a uniform range "5ms..20ms"
//   bandwidth = 1000         # bytes per ms, 0 = unlimited
//   drop = 0.01              # default link drop rate
//   drop.3.7 = 1.0           # directed link override, node indices
//   adversary = drop_all 0.5
//   horizon = 10m
struct ScenarioConfig {
    std::uint64_t seed = 1;
    std::size_t nodes = 1;
    int difficulty = 0;
    std::size_t bootstrap = 4;
    LinkParams link;
    std::map<std::pair<std::size_t, std::size_t>, double> drops;
    std::optional<AdversaryPlan> adversary;
    SimTime horizon = std::chrono::minutes(10);
    KeyValueConfig raw;  // everything, including keys the simulator ignores

    static ScenarioConfig from_config(const KeyValueConfig& cfg);
    static ScenarioConfig load(const std::string& path) { return from_config(KeyValueConfig::load(path)); }
    KeyValueConfig to_config() const;

    // Installs default link parameters and per-link drop overrides.
    // addresses[i] is node index i.
    void apply_links(SimNet& net, const std::vector<Address>& addresses) const;
};

}  // namespace ipfs::netsim
