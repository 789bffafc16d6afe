#include "gridcon/datasets.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>
#include <stdexcept>

namespace gridcon {

namespace {

std::string P(int b) { return EntityId::bus(static_cast<std::uint32_t>(b)).token(); }

struct SubstationSpec {
    int id;
    std::vector<int> buses;
    std::vector<int> feeders;
    int zone = 1;
    // Server and gateway need each other in addition to power.
    bool mutual = false;
};

struct DeviceSpec {
    int y;
    int host;
    std::vector<int> feeders;
    // Gateway the device relays through, 0 for none.
    int relay = 0;
};

class Builder {
public:
    void bus(int b) { add(EntityId::bus(static_cast<std::uint32_t>(b))); }

    void line(int a, int b) {
        EntityId l = EntityId::line(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
        add(l);
        net_.add_edge(EdgeClass::PP, EntityId::bus(static_cast<std::uint32_t>(a)), EntityId::bus(static_cast<std::uint32_t>(b)));
        net_.add_link(l, EntityId::bus(static_cast<std::uint32_t>(a)), EntityId::bus(static_cast<std::uint32_t>(b)));
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }

    // Each bus draws power from any neighbor over the connecting line.
    void bus_rules() {
        for (auto& [b, nbrs] : adjacency_) {
            std::sort(nbrs.begin(), nbrs.end());
            if (nbrs.empty()) continue;
            std::string expr;
            for (int n : nbrs) {
                if (!expr.empty()) expr += " | ";
                std::string term = P(n) + " & " + EntityId::line(static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(n)).token();
                expr += nbrs.size() > 1 ? "(" + term + ")" : term;
            }
            rule(P(b) + " <- " + expr);
        }
    }

    const std::vector<int>& neighbors(int b) { return adjacency_[b]; }

    void substation(const SubstationSpec& s) {
        auto sid = static_cast<std::uint32_t>(s.id);
        EntityId server = EntityId::server(sid);
        EntityId gateway = EntityId::gateway(sid);
        EntityId battery = EntityId::battery(sid);
        add(server);
        add(gateway);
        add(battery);

        Substation sub;
        sub.zone = s.zone;
        for (int b : s.buses) sub.members.push_back(EntityId::bus(static_cast<std::uint32_t>(b)));
        sub.members.push_back(server);
        sub.members.push_back(gateway);
        net_.annotations().substations[s.id] = sub;

        std::string server_rule = feed(1, s.feeders, server) + " # (" + battery.token() + " & " +
                                  supply(5, battery, server, sid).token() + ")";
        std::string gateway_rule = feed(2, s.feeders, gateway) + " # (" + battery.token() + " & " +
                                   supply(6, battery, gateway, sid).token() + ")";
        if (s.mutual) {
            server_rule = "(" + server_rule + ") & " + gateway.token();
            gateway_rule = "(" + gateway_rule + ") & " + server.token();
        }
        rule(server.token() + " <- " + server_rule);
        rule(gateway.token() + " <- " + gateway_rule);
        channel(server, gateway, EntityId::substation(3, sid, 1));

        EntityId rtu = EntityId::rtu(sid);
        add(rtu);
        add_link(EntityId::substation(6, sid, 1), rtu, gateway);
    }

    void pmu(int b, int sid) {
        EntityId u = EntityId::pmu(static_cast<std::uint32_t>(b));
        add(u);
        add_link(EntityId::substation(7, static_cast<std::uint32_t>(sid), static_cast<std::uint32_t>(b)), u,
                 EntityId::gateway(static_cast<std::uint32_t>(sid)));
        net_.annotations().pmu_buses.insert(EntityId::bus(static_cast<std::uint32_t>(b)));
    }

    void generator(int b) { net_.annotations().generators.insert(EntityId::bus(static_cast<std::uint32_t>(b))); }

    void sadm(const DeviceSpec& d) { device(EntityId::sadm(static_cast<std::uint32_t>(d.y)), 3, d); }
    void oadm(const DeviceSpec& d) { device(EntityId::oadm(static_cast<std::uint32_t>(d.y)), 4, d); }

    // Gateway of substation `s` attached to an SADM or OADM.
    void attach(int s, EntityId dev) {
        auto sid = static_cast<std::uint32_t>(s);
        auto x = dev.kind() == EntityKind::SonetEntity ? 4u : 5u;
        channel(EntityId::gateway(sid), dev, EntityId::substation(x, sid, dev.index(1)));
    }

    void sonet_segment(int a, int b) {
        channel(EntityId::sadm(static_cast<std::uint32_t>(a)), EntityId::sadm(static_cast<std::uint32_t>(b)),
                EntityId::sonet(2, static_cast<std::uint32_t>(std::min(a, b)), static_cast<std::uint32_t>(std::max(a, b))));
    }

    void dwdm_segment(int a, int b) {
        channel(EntityId::oadm(static_cast<std::uint32_t>(a)), EntityId::oadm(static_cast<std::uint32_t>(b)),
                EntityId::dwdm(2, static_cast<std::uint32_t>(std::min(a, b)), static_cast<std::uint32_t>(std::max(a, b))));
    }

    Network finish(std::set<int> control_centers) {
        net_.annotations().control_centers = std::move(control_centers);
        net_.validate();
        return std::move(net_);
    }

private:
    void add(EntityId e) { net_.add_entity(e); }

    void add_link(EntityId l, EntityId a, EntityId b) {
        add(l);
        net_.add_link(l, a, b);
    }

    void channel(EntityId a, EntityId b, EntityId ch) {
        net_.add_edge(EdgeClass::CC, a, b);
        add_link(ch, a, b);
    }

    void rule(const std::string& text) { net_.add_idr(parse_idr(text)); }

    EntityId supply(std::uint32_t cls, EntityId from, EntityId to, std::uint32_t id) {
        EntityId l = EntityId::supply(cls, id);
        add_link(l, from, to);
        if (from.is_power_vertex()) net_.add_edge(EdgeClass::PC, from, to);
        return l;
    }

    std::string feed(std::uint32_t cls, const std::vector<int>& feeders, EntityId to) {
        std::string expr;
        for (int b : feeders) {
            EntityId l = supply(cls, EntityId::bus(static_cast<std::uint32_t>(b)), to, ++next_[cls]);
            if (!expr.empty()) expr += " | ";
            expr += "(" + P(b) + " & " + l.token() + ")";
        }
        return feeders.size() > 1 ? "(" + expr + ")" : expr;
    }

    void device(EntityId dev, std::uint32_t cls, const DeviceSpec& d) {
        add(dev);
        net_.annotations().substations.at(d.host).members.push_back(dev);
        std::string expr = feed(cls, d.feeders, dev);
        if (d.relay != 0) {
            if (d.feeders.size() == 1) expr = "(" + expr + ")";
            expr += " & " + EntityId::gateway(static_cast<std::uint32_t>(d.relay)).token();
        }
        rule(dev.token() + " <- " + expr);
    }

    Network net_;
    std::map<int, std::vector<int>> adjacency_;
    std::map<std::uint32_t, std::uint32_t> next_;
};

}  // namespace

Network build_ieee14() {
    Builder g;
    for (int b = 1; b <= 14; ++b) g.bus(b);
    const int lines[][2] = {{1, 2}, {1, 5},  {2, 3},  {2, 4},   {2, 5},   {3, 4},   {4, 5},
                            {4, 7}, {4, 9},  {5, 6},  {6, 11},  {6, 12},  {6, 13},  {7, 8},
                            {7, 9}, {9, 10}, {9, 14}, {10, 11}, {12, 13}, {13, 14}};
    for (const auto& l : lines) g.line(l[0], l[1]);
    g.bus_rules();

    // Feeder pairs are chosen so that no two bus failures cut more than two
    // terminals or isolated buses at once.
    const SubstationSpec subs[] = {
        {1, {1}, {1, 4}},      {2, {2}, {2, 6}},      {3, {3}, {3, 5}},      {4, {4, 9}, {4, 9}},
        {5, {5, 6}, {5, 6}},   {6, {12}, {12}, 1, true}, {7, {7, 8}, {7, 8}}, {8, {10}, {10, 6}},
        {9, {11}, {11, 9}},    {10, {13}, {13, 9}},   {11, {14}, {14, 4}},
    };
    for (const auto& s : subs) g.substation(s);

    g.sadm({1, 6, {6, 13}, 6});
    g.sadm({2, 1, {1, 2}});
    g.sadm({3, 2, {2, 4}});
    g.sadm({4, 3, {3, 5}});
    g.sadm({5, 4, {4, 5}});
    g.sadm({6, 5, {5, 6}});
    g.sadm({7, 7, {9, 4}});
    g.oadm({1, 8, {10, 14}});
    g.oadm({2, 1, {1, 3}});
    g.oadm({3, 3, {2, 14}});
    g.oadm({4, 9, {11, 13}});
    g.oadm({5, 11, {10, 14}});

    // SONET ring over SADMs 2..7, one gateway on each.
    for (int y = 2; y <= 7; ++y) g.sonet_segment(y, y == 7 ? 2 : y + 1);
    for (int s = 1; s <= 6; ++s) g.attach(s, EntityId::sadm(static_cast<std::uint32_t>(s + 1)));
    // SADM 1 hangs off gateway 6 and serves substations 7, 8, 9 and 11.
    for (int s : {6, 7, 8, 9, 11}) g.attach(s, EntityId::sadm(1));
    // Two DWDM segments: OADM 2-3 near the control center, OADM 1-4-5 in the east.
    g.dwdm_segment(2, 3);
    g.dwdm_segment(1, 4);
    g.dwdm_segment(4, 5);
    g.attach(1, EntityId::oadm(2));
    g.attach(2, EntityId::oadm(3));
    g.attach(3, EntityId::oadm(3));
    g.attach(7, EntityId::oadm(1));
    g.attach(8, EntityId::oadm(4));
    g.attach(9, EntityId::oadm(4));
    g.attach(11, EntityId::oadm(5));
    g.attach(10, EntityId::oadm(1));
    g.attach(10, EntityId::oadm(5));

    for (int b : {1, 2, 3, 6, 8}) g.generator(b);
    const std::pair<int, int> pmus[] = {{2, 2}, {6, 5}, {7, 7}, {9, 4}};
    for (auto [b, s] : pmus) g.pmu(b, s);
    return g.finish({1});
}

namespace {

const int kBranches118[][2] = {
    {1, 2},     {1, 3},     {2, 12},    {3, 5},     {3, 12},    {4, 5},     {4, 11},    {5, 6},     {5, 8},
    {5, 11},    {6, 7},     {7, 12},    {8, 9},     {8, 30},    {9, 10},    {11, 12},   {11, 13},   {12, 14},
    {12, 16},   {12, 117},  {13, 15},   {14, 15},   {15, 17},   {15, 19},   {15, 33},   {16, 17},   {17, 18},
    {17, 30},   {17, 31},   {17, 113},  {18, 19},   {19, 20},   {19, 34},   {20, 21},   {21, 22},   {22, 23},
    {23, 24},   {23, 25},   {23, 32},   {24, 70},   {24, 72},   {25, 26},   {25, 27},   {26, 30},   {27, 28},
    {27, 32},   {27, 115},  {28, 29},   {29, 31},   {30, 38},   {31, 32},   {32, 113},  {32, 114},  {33, 37},
    {34, 36},   {34, 37},   {34, 43},   {35, 36},   {35, 37},   {37, 38},   {37, 39},   {37, 40},   {38, 65},
    {39, 40},   {40, 41},   {40, 42},   {41, 42},   {42, 49},   {43, 44},   {44, 45},   {45, 46},   {45, 49},
    {46, 47},   {46, 48},   {47, 49},   {47, 69},   {48, 49},   {49, 50},   {49, 51},   {49, 54},   {49, 66},
    {49, 69},   {50, 57},   {51, 52},   {51, 58},   {52, 53},   {53, 54},   {54, 55},   {54, 56},   {54, 59},
    {55, 56},   {55, 59},   {56, 57},   {56, 58},   {56, 59},   {59, 60},   {59, 61},   {59, 63},   {60, 61},
    {60, 62},   {61, 62},   {61, 64},   {62, 66},   {62, 67},   {63, 64},   {64, 65},   {65, 66},   {65, 68},
    {66, 67},   {68, 69},   {68, 81},   {68, 116},  {69, 70},   {69, 75},   {69, 77},   {70, 71},   {70, 74},
    {70, 75},   {71, 72},   {71, 73},   {74, 75},   {75, 77},   {75, 118},  {76, 77},   {76, 118},  {77, 78},
    {77, 80},   {77, 82},   {78, 79},   {79, 80},   {80, 81},   {80, 96},   {80, 97},   {80, 98},   {80, 99},
    {82, 83},   {82, 96},   {83, 84},   {83, 85},   {84, 85},   {85, 86},   {85, 88},   {85, 89},   {86, 87},
    {88, 89},   {89, 90},   {89, 92},   {90, 91},   {91, 92},   {92, 93},   {92, 94},   {92, 100},  {92, 102},
    {93, 94},   {94, 95},   {94, 96},   {94, 100},  {95, 96},   {96, 97},   {98, 100},  {99, 100},  {100, 101},
    {100, 103}, {100, 104}, {100, 106}, {101, 102}, {103, 104}, {103, 105}, {103, 110}, {104, 105}, {105, 106},
    {105, 107}, {105, 108}, {106, 107}, {108, 109}, {109, 110}, {110, 111}, {110, 112}, {114, 115},
};

const int kGenerators118[] = {1,  4,  6,  8,  10, 12, 15, 18, 19, 24, 25, 26, 27, 31,  32,  34,  36,  40,
                              42, 46, 49, 54, 55, 56, 59, 61, 62, 65, 66, 69, 70, 72,  73,  74,  76,  77,
                              80, 85, 87, 89, 90, 91, 92, 99, 100, 103, 104, 105, 107, 110, 111, 112, 113, 116};

const int kPmu118[] = {3,  5,  9,  12, 15, 17, 21, 25, 28, 34, 37, 40, 45, 49,  52,  56,
                       62, 64, 68, 70, 71, 76, 79, 83, 85, 86, 89, 92, 96, 100, 105, 110};

// Substations holding more than one bus; all others hold exactly one.
const std::vector<std::vector<int>> kSharedSubstations118 = {
    {5, 8}, {17, 30}, {25, 26}, {37, 38}, {59, 63}, {61, 64}, {65, 66}, {68, 69, 116}, {80, 81}, {86, 87},
};

// Substation id ranges per operation zone.
int zone_of(int sid) {
    const int upper[] = {13, 27, 40, 54, 67, 80, 93, 107};
    for (int z = 0; z < 8; ++z) {
        if (sid <= upper[z]) return z + 1;
    }
    return 8;
}

}  // namespace

Network build_ieee118() {
    Builder g;
    for (int b = 1; b <= 118; ++b) g.bus(b);
    for (const auto& l : kBranches118) g.line(l[0], l[1]);
    g.bus_rules();

    // Number substations in order of their lowest bus.
    std::map<int, int> station_of;
    std::vector<SubstationSpec> subs;
    for (int b = 1; b <= 118; ++b) {
        if (station_of.contains(b)) continue;
        std::vector<int> members = {b};
        for (const auto& shared : kSharedSubstations118) {
            if (shared.front() == b) members = shared;
        }
        SubstationSpec s{static_cast<int>(subs.size()) + 1, members, members, 0};
        s.zone = zone_of(s.id);
        if (members.size() == 1) s.feeders.push_back(g.neighbors(b).front());
        for (int m : members) station_of[m] = s.id;
        subs.push_back(s);
    }
    for (const auto& s : subs) g.substation(s);

    // Second feeder for a single-bus device: a co-located bus, else the lowest neighbor.
    auto feeders_at = [&](int sid, int bus) {
        std::vector<int> f = {bus};
        for (int m : subs[static_cast<std::size_t>(sid - 1)].buses) {
            if (m != bus && f.size() < 2) f.push_back(m);
        }
        if (f.size() < 2) f.push_back(g.neighbors(bus).front());
        return f;
    };

    std::map<int, std::vector<int>> zone_sadms;
    std::map<int, std::vector<std::pair<int, int>>> zone_sadm_hosts;  // zone -> (substation, sadm)
    int y = 0;
    for (int b : kGenerators118) {
        ++y;
        int sid = station_of.at(b);
        g.sadm({y, sid, feeders_at(sid, b)});
        g.attach(sid, EntityId::sadm(static_cast<std::uint32_t>(y)));
        zone_sadms[zone_of(sid)].push_back(y);
        zone_sadm_hosts[zone_of(sid)].emplace_back(sid, y);
    }
    // One SONET ring per zone.
    for (const auto& [zone, ring] : zone_sadms) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) g.sonet_segment(ring[i], ring[i + 1]);
        if (ring.size() > 2) g.sonet_segment(ring.back(), ring.front());
    }
    // Substations without their own SADM join the nearest one in their zone.
    std::set<int> has_sadm;
    for (const auto& [zone, hosts] : zone_sadm_hosts) {
        for (auto [sid, dev] : hosts) has_sadm.insert(sid);
    }
    for (const auto& s : subs) {
        if (has_sadm.contains(s.id)) continue;
        const auto& hosts = zone_sadm_hosts.at(s.zone);
        auto best = hosts.front();
        for (const auto& h : hosts) {
            if (std::abs(h.first - s.id) < std::abs(best.first - s.id)) best = h;
        }
        g.attach(s.id, EntityId::sadm(static_cast<std::uint32_t>(best.second)));
    }

    // DWDM backbone: 31 OADMs spread evenly over the substations, in one ring.
    std::set<int> bridged_zones;
    for (int o = 1; o <= 31; ++o) {
        int sid = 1 + (o - 1) * 107 / 31;
        const auto& host = subs[static_cast<std::size_t>(sid - 1)];
        g.oadm({o, sid, feeders_at(sid, host.buses.front())});
        g.attach(sid, EntityId::oadm(static_cast<std::uint32_t>(o)));
        if (bridged_zones.insert(host.zone).second && !has_sadm.contains(sid)) {
            // Already attached to the nearest SADM above; that link bridges ring and backbone.
        }
    }
    for (int o = 1; o <= 31; ++o) g.dwdm_segment(o, o == 31 ? 1 : o + 1);

    for (int b : kGenerators118) g.generator(b);
    for (int b : kPmu118) g.pmu(b, station_of.at(b));
    return g.finish({61, 16});
}

Network build_dataset(std::string_view name) {
    if (name == "ieee14") return build_ieee14();
    if (name == "ieee118") return build_ieee118();
    throw std::invalid_argument("unknown dataset '" + std::string(name) + "'");
}

}  // namespace gridcon
