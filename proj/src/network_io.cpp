#include "gridcon/network_io.hpp"

#include <fstream>
#include <sstream>

namespace gridcon {

using nlohmann::json;

namespace {

json token_array(const auto& ids) {
    json arr = json::array();
    for (const auto& id : ids) arr.push_back(id.token());
    return arr;
}

json pair_array(const std::set<EntityPair>& pairs) {
    json arr = json::array();
    for (const auto& [a, b] : pairs) arr.push_back(json::array({a.token(), b.token()}));
    return arr;
}

EntityId token(const json& j, const std::string& where) {
    if (!j.is_string()) throw NetworkError(where + ": expected entity token string");
    try {
        return EntityId::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw NetworkError(where + ": " + e.what());
    }
}

EntityPair token_pair(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw NetworkError("malformed edge in " + where);
    return {token(j[0], where), token(j[1], where)};
}

const json& optional_array(const json& doc, const char* key) {
    static const json empty = json::array();
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return empty;
    if (!it->is_array()) throw NetworkError(std::string("'") + key + "' must be an array");
    return *it;
}

}  // namespace

json save_network(const Network& network) {
    json doc;
    doc["entities"] = token_array(network.entities());

    json idrs = json::array();
    for (const auto& [target, idr] : network.idrs()) idrs.push_back(to_string(idr));
    doc["idrs"] = idrs;

    doc["edges"] = {
        {"pp", pair_array(network.edges(EdgeClass::PP))},
        {"cc", pair_array(network.edges(EdgeClass::CC))},
        {"pc", pair_array(network.edges(EdgeClass::PC))},
    };

    json links = json::object();
    for (const auto& [link, ends] : network.links()) {
        links[link.token()] = json::array({ends.first.token(), ends.second.token()});
    }
    doc["links"] = links;

    const auto& ann = network.annotations();
    json subs = json::object();
    json zones = json::object();
    for (const auto& [sid, sub] : ann.substations) {
        subs[std::to_string(sid)] = token_array(sub.members);
        if (sub.zone != 0) zones[std::to_string(sid)] = sub.zone;
    }
    doc["annotations"] = {
        {"generators", token_array(ann.generators)},
        {"pmu_buses", token_array(ann.pmu_buses)},
        {"substations", subs},
        {"control_centers", ann.control_centers},
        {"zones", zones},
    };

    json states = json::object();
    for (const auto& [id, s] : network.explicit_states()) states[id.token()] = s.value();
    doc["initial_states"] = states;
    doc["hardened"] = token_array(network.hardened());
    return doc;
}

Network load_network(const json& doc) {
    if (!doc.is_object()) throw NetworkError("network document must be a JSON object");
    Network net;
    for (const auto& t : optional_array(doc, "entities")) net.add_entity(token(t, "entities"));

    for (const auto& line : optional_array(doc, "idrs")) {
        if (!line.is_string()) throw NetworkError("idrs: expected IDR text");
        Idr idr = parse_idr(line.get<std::string>());
        for (const auto& leaf : idr.expr.leaves()) {
            if (!net.contains(leaf)) {
                throw NetworkError("IDR of " + idr.target.token() + " references undeclared entity " + leaf.token());
            }
        }
        if (!net.contains(idr.target)) throw NetworkError("IDR target " + idr.target.token() + " is undeclared");
        net.add_idr(std::move(idr));
    }

    if (auto it = doc.find("edges"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) throw NetworkError("'edges' must be an object");
        const std::pair<const char*, EdgeClass> classes[] = {
            {"pp", EdgeClass::PP}, {"cc", EdgeClass::CC}, {"pc", EdgeClass::PC}};
        for (const auto& [key, cls] : classes) {
            for (const auto& e : optional_array(*it, key)) {
                auto [a, b] = token_pair(e, std::string("edges.") + key);
                net.add_edge(cls, a, b);
            }
        }
    }

    if (auto it = doc.find("links"); it != doc.end() && !it->is_null()) {
        if (!it->is_object()) throw NetworkError("'links' must be an object");
        for (const auto& [key, ends] : it->items()) {
            auto [a, b] = token_pair(ends, "links");
            net.add_link(token(json(key), "links"), a, b);
        }
    }

    if (auto it = doc.find("annotations"); it != doc.end() && !it->is_null()) {
        const json& ann = *it;
        auto& out = net.annotations();
        for (const auto& g : optional_array(ann, "generators")) out.generators.insert(token(g, "generators"));
        for (const auto& p : optional_array(ann, "pmu_buses")) out.pmu_buses.insert(token(p, "pmu_buses"));
        if (auto s = ann.find("substations"); s != ann.end() && !s->is_null()) {
            for (const auto& [key, members] : s->items()) {
                Substation sub;
                for (const auto& m : members) sub.members.push_back(token(m, "substations"));
                out.substations[std::stoi(key)] = std::move(sub);
            }
        }
        if (auto z = ann.find("zones"); z != ann.end() && !z->is_null()) {
            for (const auto& [key, zone] : z->items()) {
                int sid = std::stoi(key);
                if (!out.substations.contains(sid)) throw NetworkError("zone for unknown substation " + key);
                out.substations[sid].zone = zone.get<int>();
            }
        }
        for (const auto& c : optional_array(ann, "control_centers")) out.control_centers.insert(c.get<int>());
    }

    if (auto it = doc.find("initial_states"); it != doc.end() && !it->is_null()) {
        for (const auto& [key, value] : it->items()) {
            if (!value.is_number_integer()) throw NetworkError("initial state of " + key + " must be 0, 1 or 2");
            try {
                net.set_state(token(json(key), "initial_states"), OperationalState::from_int(value.get<long>()));
            } catch (const std::out_of_range& e) {
                throw NetworkError(key + ": " + e.what());
            }
        }
    }
    for (const auto& h : optional_array(doc, "hardened")) net.harden(token(h, "hardened"));

    net.validate();
    return net;
}

Network load_network_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw NetworkError(std::string("invalid JSON: ") + e.what());
    }
    return load_network(doc);
}

Network load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NetworkError("cannot open network file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_network_text(buffer.str());
}

std::string dump_network(const Network& network) { return save_network(network).dump(1) + "\n"; }

}  // namespace gridcon
