#include "homlog/serialize.hpp"

#include <json.hpp>

#include "homlog/hom.hpp"
#include "homlog/reductions.hpp"

namespace homlog {

using json = nlohmann::json;  // ordered maps -> sorted keys by default

std::string structure_to_json(const Structure& s) {
    json j;
    j["constants"] = json::object();
    for (const auto& [c, e] : s.const_interp) j["constants"][c] = e;
    j["domain"] = s.domain;
    j["relations"] = json::object();
    for (const auto& [p, tuples] : s.relations) {
        json arr = json::array();
        for (const auto& t : tuples) arr.push_back(t);  // std::set iterates sorted
        j["relations"][p] = arr;
    }
    return j.dump();
}

Structure structure_from_json(const std::string& text, const Signature& sig) {
    json j = json::parse(text);
    Structure s;
    s.sig = sig;
    for (const auto& e : j.at("domain")) s.domain.push_back(e.get<int>());
    if (j.contains("constants"))
        for (auto it = j["constants"].begin(); it != j["constants"].end(); ++it)
            s.const_interp[it.key()] = it.value().get<int>();
    for (const auto& [p, ar] : sig.predicates()) s.relations[p];
    if (j.contains("relations")) {
        for (auto it = j["relations"].begin(); it != j["relations"].end(); ++it) {
            auto& rel = s.relations[it.key()];
            for (const auto& t : it.value()) rel.insert(t.get<std::vector<int>>());
        }
    }
    s.check_valid();
    return s;
}

std::string hom_to_json(const Hom& h) {
    json j;
    json m = json::object();
    for (const auto& [src, tgt] : h.map) m[std::to_string(src)] = tgt;
    json flags;
    flags["injective"] = h.is_injective();
    flags["strong"] = h.is_strong();
    flags["surjective"] = h.is_surjective();
    flags["valid"] = h.is_valid();
    j["flags"] = flags;
    j["map"] = m;
    return j.dump();
}

std::string domino_to_json(const DominoSystem& d) {
    json j;
    j["B"] = d.bottom;
    j["H"] = json::array();
    for (const auto& [x, y] : d.horizontal) j["H"].push_back(json::array({x, y}));
    j["L"] = d.left;
    j["V"] = json::array();
    for (const auto& [x, y] : d.vertical) j["V"].push_back(json::array({x, y}));
    j["tiles"] = d.tiles;
    return j.dump();
}

DominoSystem domino_from_json(const std::string& text) {
    json j = json::parse(text);
    DominoSystem d;
    for (const auto& t : j.at("tiles")) d.tiles.push_back(t.get<std::string>());
    for (const auto& t : j.at("B")) d.bottom.insert(t.get<std::string>());
    for (const auto& t : j.at("L")) d.left.insert(t.get<std::string>());
    for (const auto& t : j.at("H"))
        d.horizontal.insert({t.at(0).get<std::string>(), t.at(1).get<std::string>()});
    for (const auto& t : j.at("V"))
        d.vertical.insert({t.at(0).get<std::string>(), t.at(1).get<std::string>()});
    d.check_valid();
    return d;
}

}  // namespace homlog
