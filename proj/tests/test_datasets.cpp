#include <doctest.h>

#include "gridcon/datasets.hpp"
#include "gridcon/network_io.hpp"
#include "support/ieee118_placement.hpp"

using namespace gridcon;
using testing::kPlacement118;

namespace {

std::size_t count_kind(const Network& n, bool (*pred)(EntityId)) {
    return static_cast<std::size_t>(std::count_if(n.entities().begin(), n.entities().end(), pred));
}

}  // namespace

TEST_CASE("14-bus inventory") {
    Network n = build_ieee14();
    CHECK(count_kind(n, [](EntityId e) { return e.is_power_vertex(); }) == 14);
    CHECK(count_kind(n, [](EntityId e) { return e.is_comm_vertex(); }) == 34);
    CHECK(n.idrs().size() == 48);
    CHECK(n.annotations().substations.size() == 11);
    CHECK(n.annotations().control_centers == std::set<int>{1});
    CHECK(n.edges(EdgeClass::PP).size() == 20);
    for (const auto& e : n.entities()) {
        if (e.is_node()) CHECK(n.idrs().contains(e));
    }
}

TEST_CASE("14-bus bus 8 hangs off bus 7") {
    Network n = build_ieee14();
    CHECK(n.neighbors(EdgeClass::PP, EntityId::parse("P8")) == std::vector<EntityId>{EntityId::parse("P7")});
    CHECK(to_string(n.idrs().at(EntityId::parse("P8")).expr) == "P7 & PL7_8");
}

TEST_CASE("14-bus substation 6 terminals need each other") {
    Network n = build_ieee14();
    auto server = n.idrs().at(EntityId::parse("C1_1_6_6")).expr.leaves();
    auto gateway = n.idrs().at(EntityId::parse("C1_2_6_6")).expr.leaves();
    CHECK(std::count(server.begin(), server.end(), EntityId::parse("C1_2_6_6")) == 1);
    CHECK(std::count(gateway.begin(), gateway.end(), EntityId::parse("C1_1_6_6")) == 1);
    auto sadm = n.idrs().at(EntityId::parse("C2_1_1_0")).expr.leaves();
    CHECK(std::count(sadm.begin(), sadm.end(), EntityId::parse("C1_2_6_6")) == 1);
}

TEST_CASE("118-bus substations follow the published placement") {
    Network n = build_ieee118();
    const auto& subs = n.annotations().substations;
    REQUIRE(subs.size() == 107);
    std::set<int> seen;
    for (const auto& [sid, buses] : kPlacement118) {
        REQUIRE(subs.contains(sid));
        std::vector<EntityId> expected;
        for (int b : buses) {
            expected.push_back(EntityId::bus(static_cast<std::uint32_t>(b)));
            seen.insert(b);
        }
        std::sort(expected.begin(), expected.end());
        auto actual = subs.at(sid).buses();
        std::sort(actual.begin(), actual.end());
        CHECK_MESSAGE(actual == expected, "substation " << sid);
    }
    CHECK(seen.size() == 118);
}

TEST_CASE("118-bus communication layer") {
    Network n = build_ieee118();
    CHECK(count_kind(n, [](EntityId e) { return e.kind() == EntityKind::SonetEntity && e.is_node(); }) == 54);
    CHECK(count_kind(n, [](EntityId e) { return e.kind() == EntityKind::DwdmEntity && e.is_node(); }) == 31);
    CHECK(n.annotations().control_centers == std::set<int>{16, 61});
    CHECK(n.edges(EdgeClass::PP).size() == 179);
    std::set<int> zones;
    for (const auto& [sid, s] : n.annotations().substations) zones.insert(s.zone);
    CHECK(zones == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(n.annotations().generators.size() == 54);
    for (const auto& [sid, s] : n.annotations().substations) {
        CHECK(n.contains(EntityId::server(static_cast<std::uint32_t>(sid))));
        CHECK(n.contains(EntityId::gateway(static_cast<std::uint32_t>(sid))));
        CHECK_FALSE(n.neighbors(EdgeClass::CC, EntityId::gateway(static_cast<std::uint32_t>(sid))).empty());
    }
}

TEST_CASE("every node entity can reach a control center when nothing has failed") {
    for (const char* name : {"ieee14", "ieee118"}) {
        Network n = build_dataset(name);
        std::set<EntityId> reached;
        std::vector<EntityId> queue;
        for (int cc : n.annotations().control_centers) {
            for (const auto& m : n.annotations().substations.at(cc).comm_entities()) {
                reached.insert(m);
                queue.push_back(m);
            }
        }
        while (!queue.empty()) {
            EntityId v = queue.back();
            queue.pop_back();
            for (const auto& w : n.neighbors(EdgeClass::CC, v)) {
                if (reached.insert(w).second) queue.push_back(w);
            }
        }
        for (const auto& e : n.entities()) {
            if (e.is_comm_vertex()) CHECK_MESSAGE(reached.contains(e), name << ": " << e.token());
        }
    }
}

TEST_CASE("builders are pure") {
    CHECK(dump_network(build_ieee118()) == dump_network(build_ieee118()));
    CHECK(build_dataset("ieee14") == build_ieee14());
    CHECK_THROWS_AS(build_dataset("ieee30"), std::invalid_argument);
}
