#include <doctest.h>

#include <regex>
#include <sstream>

#include "gridcon/datasets.hpp"
#include "gridcon/ilp_export.hpp"

using namespace gridcon;

namespace {

Network three() {
    Network n;
    for (const char* e : {"P1", "P2", "P3"}) n.add_entity(EntityId::parse(e));
    n.add_idr(parse_idr("P3 <- (P1 & P2) | P2"));
    return n;
}

std::size_t count_rows(const std::string& lp, const std::string& family) {
    std::regex re("\n " + family + "_[0-9]+:");
    return static_cast<std::size_t>(std::distance(std::sregex_iterator(lp.begin(), lp.end(), re), std::sregex_iterator()));
}

std::string section(const std::string& lp, const std::string& from, const std::string& to) {
    auto a = lp.find(from);
    auto b = lp.find(to, a);
    return lp.substr(a, b - a);
}

}  // namespace

TEST_CASE("three-entity model has the hand-counted families") {
    IlpStats st;
    std::string lp = export_ilp(three(), 1, &st);
    CHECK(st.horizon == 2);
    CHECK(st.x_vars == 9);
    CHECK(st.z_vars == 2);
    CHECK(st.h_vars == 2);
    CHECK(st.g_vars == 0);
    CHECK(st.f_vars == 3);
    CHECK(count_rows(lp, "init") == 3);
    CHECK(count_rows(lp, "sum_f") == 1);
    CHECK(count_rows(lp, "mono") == 6);
    CHECK(count_rows(lp, "root") == 4);
    CHECK(count_rows(lp, "idr") == 2);
    CHECK(count_rows(lp, "z") == 4);
    CHECK(count_rows(lp, "h") == 4);
    CHECK(st.constraints == 24);
    CHECK(lp.find("f_P1 + f_P2 + f_P3 = 1") != std::string::npos);
    CHECK(lp.find("x_P1_0 + 2 f_P1 = 2") != std::string::npos);
}

TEST_CASE("document layout") {
    std::string lp = export_ilp(three(), 1);
    std::size_t last = 0;
    for (const char* s : {"Minimize", "Subject To", "Bounds", "General", "Binary", "End"}) {
        auto at = lp.find(std::string("\n") + s);
        REQUIRE(at != std::string::npos);
        CHECK(at > last);
        last = at;
    }
    CHECK(lp.find("\n obj:") != std::string::npos);
    CHECK(lp.find("\n obj:") == lp.rfind("\n obj:"));
    std::string obj = section(lp, "Minimize", "Subject To");
    CHECK(obj.find("x_P1_2 + x_P2_2 + x_P3_2") != std::string::npos);
    CHECK(section(lp, "Binary", "End").find("f_P3") != std::string::npos);
}

TEST_CASE("exclusive-or nodes get one g row each") {
    Network n;
    for (const char* e : {"P1", "P2", "P3", "P4"}) n.add_entity(EntityId::parse(e));
    n.add_idr(parse_idr("P4 <- P1 # P2 # P3"));
    IlpStats st;
    std::string lp = export_ilp(n, 2, &st);
    CHECK(st.horizon == 3);
    CHECK(st.g_vars == 3);
    CHECK(count_rows(lp, "g") == 3);
    CHECK(lp.find("3 g_P4_0_1 - x_P1_0 - x_P2_0 - x_P3_0 <= 0") != std::string::npos);
}

TEST_CASE("auxiliary count is operator nodes times horizon") {
    Network n = build_ieee14();
    std::size_t ops = 0;
    for (const auto& [id, idr] : n.idrs()) ops += idr.expr.operator_count();
    IlpStats st;
    export_ilp(n, 1, &st);
    CHECK(st.z_vars + st.h_vars + st.g_vars == ops * st.horizon);
    CHECK(st.x_vars == n.entities().size() * (st.horizon + 1));
}

TEST_CASE("failed, hardened and link entities are fixed or bounded") {
    Network n = three();
    n.add_entity(EntityId::parse("PL1_2"));
    n.add_link(EntityId::parse("PL1_2"), EntityId::parse("P1"), EntityId::parse("P2"));
    n.set_state(EntityId::parse("P1"), OperationalState::failed());
    n.harden(EntityId::parse("P2"));
    IlpStats st;
    std::string lp = export_ilp(n, 1, &st);
    CHECK(st.f_vars == 1);
    CHECK(lp.find("x_P1_0 = 0") != std::string::npos);
    CHECK(lp.find("x_PL1_2_1 - x_P1_0 - x_P2_0 <= 0") != std::string::npos);
    CHECK(lp.find("x_P2_1 - x_P2_0 = 0") != std::string::npos);
}
