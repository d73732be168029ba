#pragma once

#include <string>
#include <string_view>

#include "ipfs/common/bytes.hpp"

namespace ipfs::multiformats {

// Display base for hashes: base58 over the Bitcoin alphabet. Leading zero
// bytes map to '1'; the alphabet has no '/', so output is path-safe.
std::string base_display(ByteView bytes);

// Throws AlphabetError on characters outside the alphabet.
Bytes base_parse(std::string_view text);

}  // namespace ipfs::multiformats
