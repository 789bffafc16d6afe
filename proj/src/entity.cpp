#include "gridcon/entity.hpp"

#include <charconv>
#include <stdexcept>
#include <vector>

namespace gridcon {

namespace {

[[noreturn]] void bad_token(std::string_view token, const std::string& why) {
    throw std::invalid_argument("invalid entity token '" + std::string(token) + "': " + why);
}

// Parses "<n>_<n>_..." into exactly `count` unsigned integers.
std::vector<std::uint32_t> parse_indices(std::string_view token, std::string_view body,
                                         std::size_t count) {
    std::vector<std::uint32_t> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t end = body.find('_', pos);
        std::string_view part = body.substr(pos, end == std::string_view::npos ? body.npos : end - pos);
        if (part.empty()) bad_token(token, "empty index");
        std::uint32_t value = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc() || ptr != part.data() + part.size()) bad_token(token, "non-numeric index");
        out.push_back(value);
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    if (out.size() != count) {
        bad_token(token, "expected " + std::to_string(count) + " indices");
    }
    return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

EntityId EntityId::bus(std::uint32_t a) { return {EntityKind::Bus, {a, 0, 0}}; }

EntityId EntityId::line(std::uint32_t a, std::uint32_t b) {
    if (a == b) throw std::invalid_argument("transmission line endpoints must differ");
    if (a > b) std::swap(a, b);
    return {EntityKind::TransmissionLine, {a, b, 0}};
}

EntityId EntityId::battery(std::uint32_t x) { return {EntityKind::Battery, {x, 0, 0}}; }

EntityId EntityId::substation(std::uint32_t x, std::uint32_t y, std::uint32_t z) {
    if (x < 1 || x > 7) throw std::invalid_argument("substation entity subtype must be in 1..7");
    return {EntityKind::SubstationEntity, {x, y, z}};
}

EntityId EntityId::sonet(std::uint32_t x, std::uint32_t y, std::uint32_t z) {
    if (x < 1 || x > 2) throw std::invalid_argument("SONET entity subtype must be 1 or 2");
    return {EntityKind::SonetEntity, {x, y, z}};
}

EntityId EntityId::dwdm(std::uint32_t x, std::uint32_t y, std::uint32_t z) {
    if (x < 1 || x > 2) throw std::invalid_argument("DWDM entity subtype must be 1 or 2");
    return {EntityKind::DwdmEntity, {x, y, z}};
}

EntityId EntityId::supply(std::uint32_t line_class, std::uint32_t i) {
    if (line_class < 1 || line_class > 6) {
        throw std::invalid_argument("power supply line class must be in 1..6");
    }
    return {EntityKind::PowerSupplyLine, {line_class, i, 0}};
}

EntityId EntityId::pmu(std::uint32_t i) { return {EntityKind::Pmu, {i, 0, 0}}; }
EntityId EntityId::rtu(std::uint32_t i) { return {EntityKind::Rtu, {i, 0, 0}}; }

EntityId EntityId::parse(std::string_view token) {
    try {
        if (starts_with(token, "PBATT")) {
            return battery(parse_indices(token, token.substr(5), 1)[0]);
        }
        if (starts_with(token, "PL")) {
            auto v = parse_indices(token, token.substr(2), 2);
            return line(v[0], v[1]);
        }
        if (starts_with(token, "P")) return bus(parse_indices(token, token.substr(1), 1)[0]);
        if (starts_with(token, "C")) {
            auto v = parse_indices(token, token.substr(1), 4);
            switch (v[0]) {
            case 1: return substation(v[1], v[2], v[3]);
            case 2: return sonet(v[1], v[2], v[3]);
            case 3: return dwdm(v[1], v[2], v[3]);
            default: bad_token(token, "communication type must be 1, 2 or 3");
            }
        }
        if (starts_with(token, "L")) {
            auto v = parse_indices(token, token.substr(1), 2);
            return supply(v[0], v[1]);
        }
        if (starts_with(token, "U")) return pmu(parse_indices(token, token.substr(1), 1)[0]);
        if (starts_with(token, "R")) return rtu(parse_indices(token, token.substr(1), 1)[0]);
    } catch (const std::invalid_argument& e) {
        if (std::string_view(e.what()).starts_with("invalid entity token")) throw;
        bad_token(token, e.what());
    }
    bad_token(token, "unknown prefix");
}

EntityClass EntityId::layer() const {
    switch (kind_) {
    case EntityKind::Bus:
    case EntityKind::TransmissionLine:
    case EntityKind::Battery: return EntityClass::Power;
    case EntityKind::SubstationEntity:
    case EntityKind::SonetEntity:
    case EntityKind::DwdmEntity: return EntityClass::Communication;
    default: return EntityClass::Connector;
    }
}

bool EntityId::is_node() const {
    switch (kind_) {
    case EntityKind::Bus: return true;
    case EntityKind::SubstationEntity: return idx_[0] == 1 || idx_[0] == 2;
    case EntityKind::SonetEntity:
    case EntityKind::DwdmEntity: return idx_[0] == 1;
    default: return false;
    }
}

bool EntityId::is_channel() const {
    switch (kind_) {
    case EntityKind::SubstationEntity: return idx_[0] >= 3;
    case EntityKind::SonetEntity:
    case EntityKind::DwdmEntity: return idx_[0] == 2;
    default: return false;
    }
}

std::string EntityId::token() const {
    auto n = [this](std::size_t i) { return std::to_string(idx_[i]); };
    switch (kind_) {
    case EntityKind::Bus: return "P" + n(0);
    case EntityKind::TransmissionLine: return "PL" + n(0) + "_" + n(1);
    case EntityKind::Battery: return "PBATT" + n(0);
    case EntityKind::SubstationEntity: return "C1_" + n(0) + "_" + n(1) + "_" + n(2);
    case EntityKind::SonetEntity: return "C2_" + n(0) + "_" + n(1) + "_" + n(2);
    case EntityKind::DwdmEntity: return "C3_" + n(0) + "_" + n(1) + "_" + n(2);
    case EntityKind::PowerSupplyLine: return "L" + n(0) + "_" + n(1);
    case EntityKind::Pmu: return "U" + n(0);
    case EntityKind::Rtu: return "R" + n(0);
    }
    return {};
}

}  // namespace gridcon
