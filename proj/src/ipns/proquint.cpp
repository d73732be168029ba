#include <algorithm>

#include "ipfs/ipns/ipns.hpp"

namespace ipfs::ipns {

namespace {

constexpr std::string_view kConsonants = "bdfghjklmnprstvz";
constexpr std::string_view kVowels = "aiou";

int index_of(std::string_view alphabet, char c)
{
    auto pos = alphabet.find(c);
    return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

}  // namespace

std::string proquint_encode(ByteView data)
{
    if (data.size() % 2 != 0) throw LengthError("proquint input must have an even number of bytes");
    std::string out;
    for (std::size_t i = 0; i < data.size(); i += 2) {
        unsigned v = (unsigned(data[i]) << 8) | data[i + 1];
        if (i > 0) out += '-';
        out += kConsonants[(v >> 12) & 0xf];
        out += kVowels[(v >> 10) & 0x3];
        out += kConsonants[(v >> 6) & 0xf];
        out += kVowels[(v >> 4) & 0x3];
        out += kConsonants[v & 0xf];
    }
    return out;
}

Bytes proquint_decode(std::string_view text)
{
    Bytes out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        auto end = text.find('-', start);
        auto word = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        if (word.size() != 5) throw LengthError("proquint word '" + std::string(word) + "' is not five letters");
        unsigned v = 0;
        for (std::size_t i = 0; i < 5; ++i) {
            bool consonant = i % 2 == 0;
            int d = index_of(consonant ? kConsonants : kVowels, word[i]);
            if (d < 0) throw AlphabetError("'" + std::string(1, word[i]) + "' cannot appear there in a proquint");
            v = (v << (consonant ? 4 : 2)) | unsigned(d);
        }
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

bool looks_like_proquint(std::string_view text)
{
    if (text.size() % 6 != 5) return false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        auto pos = i % 6;
        char c = text[i];
        if (pos == 5 ? c != '-' : !std::isalpha(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace ipfs::ipns
