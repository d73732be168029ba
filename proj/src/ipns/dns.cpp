#include <algorithm>
#include <fstream>
#include <sstream>

#include "ipfs/ipns/ipns.hpp"

namespace ipfs::ipns {

namespace {

std::string normalize(std::string_view domain)
{
    std::string d(domain);
    while (!d.empty() && d.back() == '.') d.pop_back();
    std::transform(d.begin(), d.end(), d.begin(), [](unsigned char c) { return std::tolower(c); });
    return d;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

FixtureDns FixtureDns::parse(std::string_view text)
{
    FixtureDns dns;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto tab = view.find_first_of("\t ");
        if (tab == std::string_view::npos) continue;
        auto value = trim(view.substr(tab + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        dns.add(view.substr(0, tab), std::string(value));
    }
    return dns;
}

FixtureDns FixtureDns::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw NameNotFound("cannot read DNS fixture " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void FixtureDns::add(std::string_view domain, std::string value) { records_[normalize(domain)].push_back(std::move(value)); }

std::vector<std::string> FixtureDns::txt(std::string_view domain) const
{
    auto it = records_.find(normalize(domain));
    return it == records_.end() ? std::vector<std::string>{} : it->second;
}

bool is_domain(std::string_view text)
{
    if (text.find('.') == std::string_view::npos || text.front() == '.') return false;
    return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isalnum(c) || c == '.' || c == '-'; });
}

}  // namespace ipfs::ipns
