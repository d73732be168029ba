#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace ipfs {

// Virtual time: microseconds since the start of a simulation. Protocol code
// never reads the wall clock.
using SimTime = std::chrono::microseconds;

using namespace std::chrono_literals;

// "250ms", "10s", "2m", "24h", "1500us", bare integers are milliseconds.
SimTime parse_duration(std::string_view text);
std::string format_duration(SimTime t);

}  // namespace ipfs
