#include <doctest.h>

#include "gridcon/cascade.hpp"
#include "support/brute_force_oracle.hpp"
#include "support/random_networks.hpp"

using namespace gridcon;

namespace {

constexpr int kTrials = 250;

std::set<EntityId> random_failures(const Network& n, std::mt19937_64& rng, std::size_t count) {
    std::vector<EntityId> pool;
    for (const auto& e : n.entities()) {
        if (!n.hardened().contains(e)) pool.push_back(e);
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(count, pool.size()));
    return {pool.begin(), pool.end()};
}

Network parse_net(std::initializer_list<const char*> entities, std::initializer_list<const char*> rules) {
    Network n;
    for (auto e : entities) n.add_entity(EntityId::parse(e));
    for (auto r : rules) n.add_idr(parse_idr(r));
    return n;
}

int final_state(const CascadeTrace& t, const char* token) { return t.final_states().at(EntityId::parse(token)).value(); }

}  // namespace

TEST_CASE("cascade matches the oracle on random networks") {
    for (std::uint64_t seed = 1; seed <= kTrials; ++seed) {
        testing::RandomNetworkConfig cfg;
        cfg.harden_probability = 0.1;
        Network n = testing::random_network(seed, cfg);
        std::mt19937_64 rng(seed * 7919);
        auto failures = random_failures(n, rng, 1 + rng() % 3);
        for (bool isolate : {false, true}) {
            CascadeOptions opts{Model::Miim, isolate ? HardeningMode::Isolate : HardeningMode::Clamp};
            CascadeTrace t = run_cascade(n, failures, {}, opts);

            oracle::Setup setup = oracle::setup_for(n, false, isolate);
            oracle::States s = oracle::initial(n);
            for (const auto& f : failures) s[f] = 0;
            std::size_t rounds = oracle::settle(n, s, setup);
            CHECK(t.steps.size() - 1 == rounds);
            for (const auto& [e, v] : t.final_states()) CHECK(v.value() == s.at(e));
        }
    }
}

TEST_CASE("states never rise, the end is a fixpoint and the run is short") {
    for (std::uint64_t seed = 1; seed <= kTrials; ++seed) {
        Network n = testing::random_network(seed + 1000, {15, 12, true, 0.1});
        std::mt19937_64 rng(seed);
        CascadeTrace t = run_cascade(n, random_failures(n, rng, 1 + rng() % 4));
        for (std::size_t i = 1; i < t.steps.size(); ++i) {
            for (const auto& [e, v] : t.steps[i].states) CHECK(v <= t.steps[i - 1].states.at(e));
            CHECK_FALSE(t.steps[i].changed.empty());
        }
        Network at_end = n;
        for (const auto& [e, v] : t.final_states()) at_end.set_state(e, v);
        auto [next, changed] = cascade_step(at_end, t.final_states());
        CHECK(changed.empty());
        CHECK(next == t.final_states());
        CHECK(t.steps.size() - 1 <= n.entities().size());
    }
}

TEST_CASE("more hardening never increases damage") {
    for (std::uint64_t seed = 1; seed <= kTrials; ++seed) {
        Network n = testing::random_network(seed + 2000);
        std::mt19937_64 rng(seed);
        auto failures = random_failures(n, rng, 1 + rng() % 3);
        std::set<EntityId> h1, h2;
        for (const auto& e : n.entities()) {
            if (failures.contains(e)) continue;
            auto roll = rng() % 4;
            if (roll == 0) h1.insert(e);
            if (roll <= 1) h2.insert(e);
        }
        for (auto mode : {HardeningMode::Clamp, HardeningMode::Isolate}) {
            for (auto metric : {DamageMetric::StateLoss, DamageMetric::FailedCount}) {
                long d0 = damage(run_cascade(n, failures, {}, {Model::Miim, mode}), metric);
                long d1 = damage(run_cascade(n, failures, h1, {Model::Miim, mode}), metric);
                long d2 = damage(run_cascade(n, failures, h2, {Model::Miim, mode}), metric);
                CHECK(d1 <= d0);
                CHECK(d2 <= d1);
            }
        }
    }
}

TEST_CASE("a larger attack never does less damage") {
    for (std::uint64_t seed = 1; seed <= kTrials; ++seed) {
        Network n = testing::random_network(seed + 3000, {15, 12, true, 0.1});
        std::mt19937_64 rng(seed);
        auto small = random_failures(n, rng, 1 + rng() % 2);
        auto large = small;
        for (auto e : random_failures(n, rng, 2)) large.insert(e);
        for (auto metric : {DamageMetric::StateLoss, DamageMetric::FailedCount}) {
            CHECK(damage(run_cascade(n, small), metric) <= damage(run_cascade(n, large), metric));
        }
    }
}

TEST_CASE("no failures means no change") {
    Network n = testing::random_network(5);
    Network s = settled(n);
    CascadeTrace t = run_cascade(s, {});
    CHECK(t.steps.size() == 1);
    CHECK(damage(t, DamageMetric::StateLoss) == 0);
}

TEST_CASE("mutually supporting entities survive together") {
    Network n = parse_net({"P1", "P2", "P3"}, {"P1 <- P2 | P3", "P2 <- P1 | P3"});
    CascadeTrace t = run_cascade(n, {EntityId::parse("P3")});
    CHECK(final_state(t, "P1") == 2);
    CHECK(final_state(t, "P2") == 2);
}

TEST_CASE("exclusive-or leaves a reduced state under MIIM and fails under IIM") {
    Network n = parse_net({"P1", "P2", "P3"}, {"P1 <- P2 # P3"});
    CHECK(final_state(run_cascade(n, {EntityId::parse("P3")}), "P1") == 1);
    CHECK(final_state(run_cascade(n, {EntityId::parse("P3")}, {}, {Model::Iim, HardeningMode::Clamp}), "P1") == 0);
}

TEST_CASE("a link goes down only when both endpoints are down") {
    Network n = parse_net({"P1", "P2", "PL1_2"}, {});
    n.add_link(EntityId::parse("PL1_2"), EntityId::parse("P1"), EntityId::parse("P2"));
    CHECK(final_state(run_cascade(n, {EntityId::parse("P1")}), "PL1_2") == 2);
    CHECK(final_state(run_cascade(n, {EntityId::parse("P1"), EntityId::parse("P2")}), "PL1_2") == 0);
}

TEST_CASE("clamping holds an entity while isolation shields only its dependents") {
    Network n = parse_net({"P1", "P2", "P3"}, {"P2 <- P1", "P3 <- P2"});
    CascadeTrace clamp = run_cascade(n, {EntityId::parse("P1")}, {EntityId::parse("P2")});
    CHECK(final_state(clamp, "P2") == 2);
    CHECK(final_state(clamp, "P3") == 2);
    CascadeTrace iso = run_cascade(n, {EntityId::parse("P1")}, {EntityId::parse("P2")}, {Model::Miim, HardeningMode::Isolate});
    CHECK(final_state(iso, "P2") == 0);
    CHECK(final_state(iso, "P3") == 2);
}

TEST_CASE("invalid attacks are rejected") {
    Network n = parse_net({"P1", "P2"}, {"P2 <- P1"});
    CHECK_THROWS_AS(run_cascade(n, {EntityId::parse("P9")}), NetworkError);
    CHECK_THROWS_AS(run_cascade(n, {EntityId::parse("P1")}, {EntityId::parse("P1")}), NetworkError);
    n.set_state(EntityId::parse("P1"), OperationalState::reduced());
    CHECK_THROWS_AS(run_cascade(n, {}, {}, {Model::Iim, HardeningMode::Clamp}), EvalError);
}

TEST_CASE("trace exports") {
    Network n = parse_net({"P1", "P2"}, {"P2 <- P1"});
    CascadeTrace t = run_cascade(n, {EntityId::parse("P1")});
    std::string csv = trace_to_csv(t);
    CHECK(csv.rfind("t,entity,state\n", 0) == 0);
    CHECK(csv.find("1,P2,0") != std::string::npos);
    CHECK(trace_to_json(t).size() == t.steps.size());
    CHECK(parse_metric(to_string(DamageMetric::FailedCount)) == DamageMetric::FailedCount);
    CHECK(parse_model("iim") == Model::Iim);
    CHECK(parse_hardening_mode("isolate") == HardeningMode::Isolate);
    CHECK_THROWS(parse_metric("bogus"));
}
