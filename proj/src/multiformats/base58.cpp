#include "ipfs/multiformats/base58.hpp"

#include <array>

#include "ipfs/multiformats/multihash.hpp"

namespace ipfs::multiformats {

namespace {

constexpr std::string_view kAlphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

constexpr std::array<std::int8_t, 128> make_index()
{
    std::array<std::int8_t, 128> idx{};
    for (auto& v : idx) v = -1;
    for (std::size_t i = 0; i < kAlphabet.size(); ++i) idx[static_cast<unsigned char>(kAlphabet[i])] = static_cast<std::int8_t>(i);
    return idx;
}

constexpr auto kIndex = make_index();

}  // namespace

std::string base_display(ByteView bytes)
{
    std::size_t zeros = 0;
    while (zeros < bytes.size() && bytes[zeros] == 0) ++zeros;

    // Big-endian base-256 to base-58 conversion; digits stored little-endian.
    std::vector<std::uint8_t> digits;
    digits.reserve(bytes.size() * 138 / 100 + 1);
    for (std::size_t i = zeros; i < bytes.size(); ++i) {
        std::uint32_t carry = bytes[i];
        for (auto& d : digits) {
            carry += static_cast<std::uint32_t>(d) << 8;
            d = static_cast<std::uint8_t>(carry % 58);
            carry /= 58;
        }
        while (carry > 0) {
            digits.push_back(static_cast<std::uint8_t>(carry % 58));
            carry /= 58;
        }
    }

    std::string out(zeros, '1');
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back(kAlphabet[*it]);
    return out;
}

Bytes base_parse(std::string_view text)
{
    std::size_t zeros = 0;
    while (zeros < text.size() && text[zeros] == '1') ++zeros;

    std::vector<std::uint8_t> bytes;  // little-endian base-256
    for (std::size_t i = zeros; i < text.size(); ++i) {
        auto c = static_cast<unsigned char>(text[i]);
        int v = c < 128 ? kIndex[c] : -1;
        if (v < 0)
            throw AlphabetError("character '" + std::string(1, text[i]) + "' at position " + std::to_string(i) +
                                " is not in the base58 alphabet");
        std::uint32_t carry = static_cast<std::uint32_t>(v);
        for (auto& b : bytes) {
            carry += static_cast<std::uint32_t>(b) * 58;
            b = static_cast<std::uint8_t>(carry & 0xff);
            carry >>= 8;
        }
        while (carry > 0) {
            bytes.push_back(static_cast<std::uint8_t>(carry & 0xff));
            carry >>= 8;
        }
    }

    Bytes out(zeros, 0);
    out.insert(out.end(), bytes.rbegin(), bytes.rend());
    return out;
}

}  // namespace ipfs::multiformats
