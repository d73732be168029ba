#include <json.hpp>

#include "ipfs/merkledag/dag.hpp"

namespace ipfs::dag {

using nlohmann::json;

namespace {

bool valid_utf8(const Bytes& data)
{
    try {
        (void)json(std::string(data.begin(), data.end())).dump();
        return true;
    } catch (const json::type_error&) {
        return false;
    }
}

}  // namespace

std::string to_json(const DagObject& obj, int indent)
{
    json out;
    if (valid_utf8(obj.data))
        out["data"] = std::string(obj.data.begin(), obj.data.end());
    else
        out["data"] = json{{"hex", to_hex(obj.data)}};
    out["links"] = json::array();
    for (const auto& link : obj.links)
        out["links"].push_back({{"hash", link.hash.to_string()}, {"name", link.name}, {"size", link.size}});
    return out.dump(indent);
}

DagObject from_json(std::string_view text)
{
    DagObject obj;
    try {
        auto in = json::parse(text);
        const auto& data = in.at("data");
        if (data.is_string()) {
            auto s = data.get<std::string>();
            obj.data.assign(s.begin(), s.end());
        } else {
            obj.data = from_hex(data.at("hex").get<std::string>());
        }
        if (in.contains("links"))
            for (const auto& l : in.at("links"))
                obj.links.push_back(DagLink{l.value("name", std::string()),
                                            Multihash::parse(l.at("hash").get<std::string>()),
                                            l.value("size", std::uint64_t{0})});
    } catch (const json::exception& e) {
        throw DecodeError(std::string("object text form: ") + e.what(), 0);
    } catch (const std::invalid_argument& e) {
        throw DecodeError(std::string("object text form: ") + e.what(), 0);
    }
    return obj;
}

}  // namespace ipfs::dag
