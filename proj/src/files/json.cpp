#include <json.hpp>

#include "ipfs/files/files.hpp"

namespace ipfs::files {

using nlohmann::ordered_json;

std::string file_json(const dag::DagObject& obj, int indent)
{
    auto node = FileNode::parse(obj);
    ordered_json out;
    switch (node.kind) {
    case Kind::blob: {
        std::string text(node.content.begin(), node.content.end());
        try {
            out["data"] = text;
            (void)out.dump();
        } catch (const ordered_json::type_error&) {
            out["data"] = ordered_json{{"hex", to_hex(node.content)}};
        }
        break;
    }
    case Kind::list:
    case Kind::tree:
    case Kind::flat_tree: {
        out["data"] = ordered_json::array();
        for (auto k : node.child_kinds) out["data"].push_back(kind_name(k));
        break;
    }
    case Kind::commit:
        out["data"] = ordered_json{
            {"type", kind_name(node.commit.type)}, {"date", node.commit.date}, {"message", node.commit.message}};
        break;
    case Kind::ipns_link:
        out["data"] = ordered_json{{"type", "ipns"}, {"target", Multihash::decode(node.ipns_target).to_string()}};
        break;
    }
    out["links"] = ordered_json::array();
    for (const auto& l : obj.links) {
        ordered_json link{{"hash", l.hash.to_string()}};
        if (node.kind != Kind::list) link["name"] = l.name;
        link["size"] = l.size;
        out["links"].push_back(std::move(link));
    }
    return out.dump(indent);
}

}  // namespace ipfs::files
