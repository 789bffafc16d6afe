#include "gridcon/network.hpp"

namespace gridcon {

EntityPair normalized(EntityId a, EntityId b) { return a < b ? EntityPair{a, b} : EntityPair{b, a}; }

std::vector<EntityId> Substation::buses() const {
    std::vector<EntityId> out;
    for (const auto& m : members) {
        if (m.is_power_vertex()) out.push_back(m);
    }
    return out;
}

std::vector<EntityId> Substation::comm_entities() const {
    std::vector<EntityId> out;
    for (const auto& m : members) {
        if (m.layer() == EntityClass::Communication) out.push_back(m);
    }
    return out;
}

void Network::add_entity(EntityId id) { entities_.insert(id); }

void Network::add_idr(Idr idr) {
    if (idrs_.contains(idr.target)) {
        throw NetworkError("duplicate IDR for " + idr.target.token());
    }
    EntityId target = idr.target;
    idrs_.emplace(target, std::move(idr));
}

void Network::add_edge(EdgeClass cls, EntityId a, EntityId b) {
    bool ok = false;
    switch (cls) {
    case EdgeClass::PP: ok = a.is_power_vertex() && b.is_power_vertex(); break;
    case EdgeClass::CC: ok = a.is_comm_vertex() && b.is_comm_vertex(); break;
    case EdgeClass::PC:
        ok = (a.is_power_vertex() && b.is_comm_vertex()) || (a.is_comm_vertex() && b.is_power_vertex());
        break;
    }
    if (!ok || a == b) throw NetworkError("malformed edge " + a.token() + " - " + b.token());
    auto& set = cls == EdgeClass::PP ? pp_ : cls == EdgeClass::CC ? cc_ : pc_;
    set.insert(normalized(a, b));
}

void Network::add_link(EntityId link, EntityId a, EntityId b) {
    if (a == b || link == a || link == b) throw NetworkError("malformed link " + link.token());
    links_[link] = normalized(a, b);
}

void Network::set_state(EntityId id, OperationalState s) {
    if (s == OperationalState::full()) {
        states_.erase(id);
    } else {
        states_[id] = s;
    }
}

void Network::harden(EntityId id) { hardened_.insert(id); }

const std::set<EntityPair>& Network::edges(EdgeClass cls) const {
    switch (cls) {
    case EdgeClass::PP: return pp_;
    case EdgeClass::CC: return cc_;
    case EdgeClass::PC: break;
    }
    return pc_;
}

OperationalState Network::state(EntityId id) const {
    auto it = states_.find(id);
    return it == states_.end() ? OperationalState::full() : it->second;
}

StateTable Network::states() const {
    StateTable out;
    for (const auto& id : entities_) out.emplace(id, state(id));
    return out;
}

std::vector<EntityId> Network::neighbors(EdgeClass cls, EntityId id) const {
    std::vector<EntityId> out;
    for (const auto& [a, b] : edges(cls)) {
        if (a == id) out.push_back(b);
        if (b == id) out.push_back(a);
    }
    return out;
}

void Network::validate() const {
    auto require = [this](EntityId id, const std::string& where) {
        if (!entities_.contains(id)) {
            throw NetworkError("dangling reference to " + id.token() + " in " + where);
        }
    };
    for (const auto& [target, idr] : idrs_) {
        require(target, "IDR target");
        for (const auto& leaf : idr.expr.leaves()) {
            require(leaf, "IDR of " + target.token());
            if (leaf == target) throw NetworkError("self-dependency in IDR of " + target.token());
        }
    }
    for (auto cls : {EdgeClass::PP, EdgeClass::CC, EdgeClass::PC}) {
        for (const auto& [a, b] : edges(cls)) {
            require(a, "edge");
            require(b, "edge");
        }
    }
    for (const auto& [link, ends] : links_) {
        require(link, "link");
        require(ends.first, "link " + link.token());
        require(ends.second, "link " + link.token());
    }
    for (const auto& g : annotations_.generators) {
        require(g, "generators");
        if (!g.is_power_vertex()) throw NetworkError("generator annotation on non-bus " + g.token());
    }
    for (const auto& p : annotations_.pmu_buses) {
        require(p, "pmu_buses");
        if (!p.is_power_vertex()) throw NetworkError("PMU annotation on non-bus " + p.token());
    }
    std::set<EntityId> placed;
    for (const auto& [sid, sub] : annotations_.substations) {
        for (const auto& m : sub.members) {
            require(m, "substation " + std::to_string(sid));
            if (!placed.insert(m).second) {
                throw NetworkError(m.token() + " belongs to more than one substation");
            }
        }
    }
    for (int cc : annotations_.control_centers) {
        if (!annotations_.substations.contains(cc)) {
            throw NetworkError("control center " + std::to_string(cc) + " is not a substation");
        }
    }
    for (const auto& [id, s] : states_) require(id, "initial_states");
    for (const auto& id : hardened_) require(id, "hardened");
}

}  // namespace gridcon
