#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gridcon/entity.hpp"
#include "gridcon/idr.hpp"

namespace gridcon {

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Edge classes of the two-layer graph: transmission (bus-bus),
/// communication (terminal-terminal) and power supply (bus-terminal).
enum class EdgeClass { PP, CC, PC };

using EntityPair = std::pair<EntityId, EntityId>;

/// One substation: its buses, hosted communication terminals and zone label.
struct Substation {
    std::vector<EntityId> members;
    int zone = 0;

    [[nodiscard]] std::vector<EntityId> buses() const;
    [[nodiscard]] std::vector<EntityId> comm_entities() const;
};

using SubstationMap = std::map<int, Substation>;

struct Annotations {
    std::set<EntityId> generators;
    std::set<EntityId> pmu_buses;
    SubstationMap substations;
    std::set<int> control_centers;

    friend bool operator==(const Annotations&, const Annotations&) = default;
};

inline bool operator==(const Substation& a, const Substation& b) {
    return a.members == b.members && a.zone == b.zone;
}

/// A joint power/communication network: entities, their interdependency
/// relations, the three edge classes and the current state table.
///
/// Entities without an IDR are independent roots. Line, channel and supply
/// entities may carry a link (two endpoint entities); a link with no IDR
/// goes down once both of its endpoints have failed.
class Network {
public:
    void add_entity(EntityId id);
    void add_idr(Idr idr);
    void add_edge(EdgeClass cls, EntityId a, EntityId b);
    void add_link(EntityId link, EntityId a, EntityId b);
    void set_state(EntityId id, OperationalState s);
    void harden(EntityId id);
    void unharden(EntityId id) { hardened_.erase(id); }
    void remove_idr(EntityId id) { idrs_.erase(id); }
    Annotations& annotations() { return annotations_; }

    [[nodiscard]] const std::set<EntityId>& entities() const { return entities_; }
    [[nodiscard]] bool contains(EntityId id) const { return entities_.contains(id); }
    [[nodiscard]] const std::map<EntityId, Idr>& idrs() const { return idrs_; }
    [[nodiscard]] const std::set<EntityPair>& edges(EdgeClass cls) const;
    [[nodiscard]] const std::map<EntityId, EntityPair>& links() const { return links_; }
    [[nodiscard]] const Annotations& annotations() const { return annotations_; }
    [[nodiscard]] const std::set<EntityId>& hardened() const { return hardened_; }
    [[nodiscard]] OperationalState state(EntityId id) const;
    /// Full state table, defaulting unspecified entities to full operation.
    [[nodiscard]] StateTable states() const;
    [[nodiscard]] const StateTable& explicit_states() const { return states_; }

    /// Neighbors of `id` within one edge class.
    [[nodiscard]] std::vector<EntityId> neighbors(EdgeClass cls, EntityId id) const;

    /// Checks every structural invariant; throws NetworkError.
    void validate() const;

    friend bool operator==(const Network&, const Network&) = default;

private:
    std::set<EntityId> entities_;
    std::map<EntityId, Idr> idrs_;
    std::set<EntityPair> pp_, cc_, pc_;
    std::map<EntityId, EntityPair> links_;
    Annotations annotations_;
    StateTable states_;
    std::set<EntityId> hardened_;
};

EntityPair normalized(EntityId a, EntityId b);

}  // namespace gridcon
