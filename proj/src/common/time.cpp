#include "ipfs/common/time.hpp"

#include <cctype>
#include <stdexcept>

namespace ipfs {

SimTime parse_duration(std::string_view text)
{
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) throw std::invalid_argument("duration: missing number in '" + std::string(text) + "'");
    std::int64_t n = std::stoll(std::string(text.substr(start, i - start)));
    std::string unit;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) unit.push_back(text[i++]);
    if (unit.empty() || unit == "ms") return std::chrono::milliseconds(n);
    if (unit == "us") return SimTime(n);
    if (unit == "s") return std::chrono::seconds(n);
    if (unit == "m") return std::chrono::minutes(n);
    if (unit == "h") return std::chrono::hours(n);
    throw std::invalid_argument("duration: unknown unit '" + unit + "'");
}

std::string format_duration(SimTime t)
{
    auto us = t.count();
    if (us % 1000 != 0) return std::to_string(us) + "us";
    auto ms = us / 1000;
    if (ms % 1000 != 0) return std::to_string(ms) + "ms";
    auto s = ms / 1000;
    if (s != 0 && s % 3600 == 0) return std::to_string(s / 3600) + "h";
    return std::to_string(s) + "s";
}

}  // namespace ipfs
