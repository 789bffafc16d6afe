#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace gridcon {

enum class EntityKind : std::uint8_t {
    Bus,
    TransmissionLine,
    Battery,
    SubstationEntity,
    SonetEntity,
    DwdmEntity,
    PowerSupplyLine,
    Pmu,
    Rtu,
};

/// Layer class of an entity: power (P), communication (C) or connector (CP).
enum class EntityClass : std::uint8_t { Power, Communication, Connector };

/// Typed identifier of a smart-grid entity.
///
/// Token spelling: `P<a>` bus, `PL<a>_<b>` transmission line, `PBATT<x>`
/// battery, `C<T>_<X>_<Y>_<Z>` communication entity of type T (1 substation,
/// 2 SONET ring, 3 DWDM ring), `L<k>_<i>` power supply line, `U<i>` PMU and
/// `R<i>` RTU. Ordering is by kind, then indices lexicographically.
class EntityId {
public:
    EntityId() = default;

    static EntityId bus(std::uint32_t a);
    /// Endpoints are normalized so that the smaller bus index comes first.
    static EntityId line(std::uint32_t a, std::uint32_t b);
    static EntityId battery(std::uint32_t x);
    static EntityId substation(std::uint32_t x, std::uint32_t y, std::uint32_t z);
    static EntityId sonet(std::uint32_t x, std::uint32_t y, std::uint32_t z);
    static EntityId dwdm(std::uint32_t x, std::uint32_t y, std::uint32_t z);
    static EntityId supply(std::uint32_t line_class, std::uint32_t i);
    static EntityId pmu(std::uint32_t i);
    static EntityId rtu(std::uint32_t i);

    // Named substation members. Server and gateway ids equal the substation id.
    static EntityId server(std::uint32_t s) { return substation(1, s, s); }
    static EntityId gateway(std::uint32_t s) { return substation(2, s, s); }
    static EntityId sadm(std::uint32_t y) { return sonet(1, y, 0); }
    static EntityId oadm(std::uint32_t y) { return dwdm(1, y, 0); }

    /// Throws std::invalid_argument on malformed tokens.
    static EntityId parse(std::string_view token);

    [[nodiscard]] EntityKind kind() const { return kind_; }
    [[nodiscard]] std::uint32_t index(std::size_t i) const { return idx_.at(i); }
    [[nodiscard]] EntityClass layer() const;

    /// Buses, servers, gateways, SADMs and OADMs. These are the graph vertices
    /// that contingency analysis considers; lines, channels and connectors are not.
    [[nodiscard]] bool is_node() const;
    [[nodiscard]] bool is_power_vertex() const { return kind_ == EntityKind::Bus; }
    [[nodiscard]] bool is_comm_vertex() const { return is_node() && !is_power_vertex(); }
    [[nodiscard]] bool is_channel() const;

    [[nodiscard]] std::string token() const;

    friend auto operator<=>(const EntityId&, const EntityId&) = default;
    friend bool operator==(const EntityId&, const EntityId&) = default;

private:
    EntityId(EntityKind kind, std::array<std::uint32_t, 3> idx) : kind_(kind), idx_(idx) {}

    EntityKind kind_ = EntityKind::Bus;
    std::array<std::uint32_t, 3> idx_{};
};

struct EntityIdHash {
    std::size_t operator()(const EntityId& id) const noexcept {
        std::size_t h = static_cast<std::size_t>(id.kind());
        for (std::size_t i = 0; i < 3; ++i) h = h * 1000003u ^ id.index(i);
        return h;
    }
};

}  // namespace gridcon
