#include "gridcon/game.hpp"

#include <algorithm>
#include <random>

#include "evaluator.hpp"

namespace gridcon {

void PayoffTable::validate() const {
    for (const auto& e : entries) {
        if (e.defender_hardened < e.defender_not_hardened) {
            throw GameError("payoff for " + e.target + ": defender gains less by hardening");
        }
        if (e.attacker_not_hardened < e.attacker_hardened) {
            throw GameError("payoff for " + e.target + ": attacker gains more against a hardened target");
        }
    }
}

PayoffTable PayoffTable::from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) throw GameError("payoff table must be an array");
    PayoffTable t;
    try {
        for (const auto& row : doc) {
            t.entries.push_back({row.at("target").get<std::string>(), row.at("ud_h").get<long>(),
                                 row.at("ud_n").get<long>(), row.at("ua_h").get<long>(), row.at("ua_n").get<long>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw GameError(std::string("malformed payoff table: ") + e.what());
    }
    t.validate();
    return t;
}

nlohmann::json PayoffTable::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : entries) {
        out.push_back({{"target", e.target},
                       {"ud_h", e.defender_hardened},
                       {"ud_n", e.defender_not_hardened},
                       {"ua_h", e.attacker_hardened},
                       {"ua_n", e.attacker_not_hardened}});
    }
    return out;
}

GameScenario GameScenario::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw GameError("scenario must be a JSON object");
    GameScenario s;
    try {
        s.game_type = doc.at("game_type").get<int>();
        s.k = doc.at("k").get<int>();
        s.m = doc.value("m", 0);
        s.l = doc.value("l", 0);
        for (const auto& t : doc.value("region", nlohmann::json::array())) {
            s.region.push_back(EntityId::parse(t.get<std::string>()));
        }
        s.region_substations = doc.value("region_substations", std::vector<int>{});
        s.seed = doc.value("seed", std::uint64_t{0});
        s.solver = parse_solver(doc.value("solver", std::string("heuristic")));
        s.metric = parse_metric(doc.value("metric", std::string("state-loss")));
        s.model = parse_model(doc.value("model", std::string("miim")));
        s.mode = parse_hardening_mode(doc.value("hardening_mode", std::string("clamp")));
        if (doc.contains("arrest_budget")) s.arrest_budget = doc.at("arrest_budget").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw GameError(std::string("malformed scenario: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw GameError(std::string("malformed scenario: ") + e.what());
    }
    return s;
}

nlohmann::json GameScenario::to_json() const {
    nlohmann::json region_tokens = nlohmann::json::array();
    for (const auto& r : region) region_tokens.push_back(r.token());
    nlohmann::json out = {{"game_type", game_type},
                          {"k", k},
                          {"m", m},
                          {"l", l},
                          {"region", region_tokens},
                          {"region_substations", region_substations},
                          {"seed", seed},
                          {"solver", to_string(solver)},
                          {"metric", to_string(metric)},
                          {"model", to_string(model)},
                          {"hardening_mode", to_string(mode)}};
    if (arrest_budget) out["arrest_budget"] = *arrest_budget;
    return out;
}

namespace {

SolverOptions solver_options(const GameScenario& s) {
    SolverOptions o;
    o.metric = s.metric;
    o.model = s.model;
    o.mode = s.mode;
    return o;
}

long count_drops(const detail::SetEvaluator& ev, std::uint32_t seed, Workspace& ws, std::vector<std::uint8_t>& out) {
    ev.run({seed}, ws, out);
    long n = 0;
    for (std::uint32_t i = 0; i < out.size(); ++i) {
        if (i != seed && ev.engine().is_node(i) && out[i] < ev.baseline()[i]) ++n;
    }
    return n;
}

// Candidates sorted by impact factor, highest first, then canonical order.
std::vector<std::pair<EntityId, long>> rank_by_impact(const Network& network, const std::vector<EntityId>& candidates,
                                                      const SolverOptions& options) {
    detail::SetEvaluator ev(network, options);
    Workspace ws;
    std::vector<std::uint8_t> scratch;
    std::vector<std::pair<EntityId, long>> out;
    for (const auto& c : candidates) out.emplace_back(c, count_drops(ev, ev.engine().index(c), ws, scratch));
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

bool cascade_pending(const Network& network, const SolverOptions& options) {
    Engine engine(network, options.model);
    std::vector<std::uint8_t> cur = engine.initial_states();
    Protection p = engine.protection(network.hardened(), options.mode, cur);
    Workspace ws;
    return engine.step(cur, p, ws, true);
}

// Settled states from the network's current states under `hardened`.
std::vector<std::uint8_t> settle_under(const Engine& engine, const std::set<EntityId>& hardened, HardeningMode mode) {
    std::vector<std::uint8_t> cur = engine.initial_states();
    Protection p = engine.protection(hardened, mode, cur);
    Workspace ws;
    engine.settle(cur, p, ws, std::nullopt);
    return cur;
}

// Impact of entities the running cascade is about to lower: how many other
// node entities end higher when the entity is held at its current state.
std::vector<std::pair<EntityId, long>> at_risk(const Network& network, const SolverOptions& options) {
    Engine engine(network, options.model);
    std::vector<std::uint8_t> now = engine.initial_states();
    std::vector<std::uint8_t> fate = settle_under(engine, network.hardened(), options.mode);
    std::vector<std::pair<EntityId, long>> out;
    for (std::uint32_t i = 0; i < engine.size(); ++i) {
        EntityId id = engine.entity(i);
        if (!engine.is_node(i) || fate[i] >= now[i] || network.hardened().contains(id)) continue;
        std::set<EntityId> hardened = network.hardened();
        hardened.insert(id);
        std::vector<std::uint8_t> saved = settle_under(engine, hardened, options.mode);
        long n = 0;
        for (std::uint32_t j = 0; j < engine.size(); ++j) {
            if (j != i && engine.is_node(j) && saved[j] > fate[j]) ++n;
        }
        out.emplace_back(id, n);
    }
    return out;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

long operational(const StateTable& states) {
    long n = 0;
    for (const auto& [id, s] : states) n += id.is_node() && s.value() > 0 ? 1 : 0;
    return n;
}

}  // namespace

long impact_factor(const Network& network, EntityId entity, const CascadeOptions& options) {
    SolverOptions o;
    o.model = options.model;
    o.mode = options.mode;
    detail::SetEvaluator ev(network, o);
    std::uint32_t i = ev.engine().index(entity);
    if (ev.protected_entity(i)) throw NetworkError(entity.token() + " is hardened");
    if (ev.baseline()[i] == 0) throw NetworkError(entity.token() + " has already failed");
    Workspace ws;
    std::vector<std::uint8_t> scratch;
    return count_drops(ev, i, ws, scratch);
}

ArrestResult adaptive_harden(const Network& network, const std::set<EntityId>& active_failures, int budget,
                             Solver solver, const SolverOptions& options) {
    Network cur = network;
    for (const auto& f : active_failures) {
        if (!cur.contains(f)) throw NetworkError("unknown entity " + f.token());
        if (cur.hardened().contains(f)) throw NetworkError("cannot fail hardened entity " + f.token());
        cur.set_state(f, OperationalState::failed());
    }
    ArrestResult result;
    while (budget > 0 && cascade_pending(cur, options)) {
        std::vector<EntityId> listed;
        try {
            int k = std::min<int>(budget, static_cast<int>(eligible_entities(cur, options).size()));
            if (k < 1) break;
            for (const auto& set : k_contingency(cur, k, solver, options).best_sets) {
                listed.insert(listed.end(), set.begin(), set.end());
            }
        } catch (const ContingencyError&) {
            break;
        }
        // Entities the cascade is about to lower compete on the entities they would save.
        auto ranking = at_risk(cur, options);
        std::sort(listed.begin(), listed.end());
        listed.erase(std::unique(listed.begin(), listed.end()), listed.end());
        std::erase_if(listed, [&](EntityId e) {
            return std::any_of(ranking.begin(), ranking.end(), [&](const auto& r) { return r.first == e; });
        });
        for (const auto& r : rank_by_impact(cur, listed, options)) ranking.push_back(r);
        if (ranking.empty()) break;
        std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        cur.harden(ranking.front().first);
        result.hardened.push_back(ranking.front().first);
        result.impact.push_back(ranking.front().second);
        ++result.iterations;
        --budget;
    }
    std::set<EntityId> hardened(result.hardened.begin(), result.hardened.end());
    result.trace = run_cascade(network, active_failures, hardened, {options.model, options.mode});
    return result;
}

std::vector<EntityId> best_response_attack(const Network& network, const std::set<EntityId>& hardened, int budget,
                                           const SolverOptions& options, Solver solver) {
    Network net = network;
    for (const auto& h : hardened) net.harden(h);
    ContingencyResult r = k_contingency(net, budget, solver, options);
    if (r.best_sets.empty()) throw ContingencyError("no attack set available");
    return r.best_sets.front();
}

GameOutcome run_game(const Network& network, const GameScenario& s) {
    if (s.k < 1) throw GameError("defender budget k must be positive");
    const SolverOptions opts = solver_options(s);
    const Network base = settled(network, {s.model, s.mode});
    const std::vector<EntityId> eligible = eligible_entities(base, opts);

    GameOutcome out;
    out.game_type = s.game_type;
    std::vector<EntityId> attacked;
    // Without a defender the type 2 region fails whole.
    std::set<EntityId> unhardened_attack;

    if (s.game_type == 1) {
        if (s.m < 1) throw GameError("type 1 needs attacker budget m >= 1");
        if (static_cast<std::size_t>(s.k + s.m) > eligible.size()) {
            throw GameError("k + m exceeds the eligible entity count");
        }
        out.pre_hardened = k_contingency(base, s.k, s.solver, opts).best_sets.front();
        std::set<EntityId> pre(out.pre_hardened.begin(), out.pre_hardened.end());
        attacked = best_response_attack(base, pre, s.m, opts, s.solver);
        Network committed = base;
        for (const auto& h : pre) committed.harden(h);
        std::set<EntityId> attack(attacked.begin(), attacked.end());
        ArrestResult arrest = adaptive_harden(committed, attack, s.arrest_budget.value_or(s.k), s.solver, opts);
        out.adaptive_hardened = arrest.hardened;
        for (std::size_t i = 0; i < arrest.hardened.size(); ++i) {
            out.impact_ranking.emplace_back(arrest.hardened[i], arrest.impact[i]);
        }
    } else if (s.game_type == 2) {
        std::set<EntityId> region(s.region.begin(), s.region.end());
        for (int sid : s.region_substations) {
            auto it = base.annotations().substations.find(sid);
            if (it == base.annotations().substations.end()) throw GameError("unknown substation " + std::to_string(sid));
            for (const auto& m : it->second.members) {
                if (m.is_node()) region.insert(m);
            }
        }
        for (const auto& r : region) {
            if (!base.contains(r)) throw GameError("region names unknown entity " + r.token());
        }
        std::vector<EntityId> members;
        for (const auto& e : eligible) {
            if (region.contains(e)) members.push_back(e);
        }
        if (static_cast<std::size_t>(s.k) >= members.size()) {
            throw GameError("type 2 needs k < M, the number of attackable region entities (" +
                            std::to_string(members.size()) + ")");
        }
        CascadeTrace whole = run_cascade(base, {members.begin(), members.end()}, {}, {s.model, s.mode});
        std::vector<EntityId> predicted;
        for (const auto& [id, v] : whole.final_states()) {
            if (id.is_node() && v < base.state(id)) out.predicted_vulnerable.push_back(id);
        }
        for (const auto& p : out.predicted_vulnerable) {
            if (std::binary_search(eligible.begin(), eligible.end(), p)) predicted.push_back(p);
        }
        out.impact_ranking = rank_by_impact(base, predicted, opts);
        for (std::size_t i = 0; i < out.impact_ranking.size() && i < static_cast<std::size_t>(s.k); ++i) {
            out.pre_hardened.push_back(out.impact_ranking[i].first);
        }
        unhardened_attack.insert(members.begin(), members.end());
        for (const auto& m : members) {
            if (std::find(out.pre_hardened.begin(), out.pre_hardened.end(), m) == out.pre_hardened.end()) {
                attacked.push_back(m);
            }
        }
    } else if (s.game_type == 3) {
        if (s.l < 1) throw GameError("type 3 needs l >= 1");
        if (static_cast<std::size_t>(s.l) > eligible.size()) throw GameError("l exceeds the eligible entity count");
        std::vector<EntityId> pool = eligible;
        std::mt19937_64 rng(s.seed);
        for (int i = 0; i < s.l; ++i) {
            auto j = static_cast<std::size_t>(i) + bounded(rng, pool.size() - static_cast<std::size_t>(i));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
            attacked.push_back(pool[static_cast<std::size_t>(i)]);
        }
        std::sort(attacked.begin(), attacked.end());
        ArrestResult arrest = adaptive_harden(base, {attacked.begin(), attacked.end()},
                                              s.arrest_budget.value_or(s.k), s.solver, opts);
        out.adaptive_hardened = arrest.hardened;
        for (std::size_t i = 0; i < arrest.hardened.size(); ++i) {
            out.impact_ranking.emplace_back(arrest.hardened[i], arrest.impact[i]);
        }
    } else {
        throw GameError("game_type must be 1, 2 or 3");
    }

    std::sort(attacked.begin(), attacked.end());
    out.attacked = attacked;
    out.hardened.insert(out.pre_hardened.begin(), out.pre_hardened.end());
    out.hardened.insert(out.adaptive_hardened.begin(), out.adaptive_hardened.end());
    for (const auto& a : attacked) {
        if (out.hardened.contains(a)) throw GameError("attacked entity " + a.token() + " is hardened");
    }

    std::set<EntityId> attack(attacked.begin(), attacked.end());
    out.trace = run_cascade(base, attack, out.hardened, {s.model, s.mode});
    if (s.game_type != 2) unhardened_attack = attack;
    CascadeTrace bare = run_cascade(base, unhardened_attack, {}, {s.model, s.mode});
    out.damage_hardened = damage(out.trace, s.metric);
    out.damage_unhardened = damage(bare, s.metric);
    out.operational_before = operational(out.trace.before);
    out.operational_after_hardened = operational(out.trace.final_states());
    out.operational_after_unhardened = operational(bare.final_states());

    out.payoff.target = "game";
    out.payoff.defender_not_hardened = -out.damage_unhardened;
    out.payoff.defender_hardened = out.damage_unhardened - out.damage_hardened;
    out.payoff.attacker_not_hardened = out.damage_unhardened;
    out.payoff.attacker_hardened = out.damage_hardened - out.damage_unhardened;
    return out;
}

nlohmann::json to_json(const GameOutcome& o) {
    auto tokens = [](const auto& ids) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& id : ids) a.push_back(id.token());
        return a;
    };
    nlohmann::json ranking = nlohmann::json::array();
    for (const auto& [id, v] : o.impact_ranking) ranking.push_back({{"entity", id.token()}, {"impact_factor", v}});
    return {{"game_type", o.game_type},
            {"pre_hardened", tokens(o.pre_hardened)},
            {"adaptive_hardened", tokens(o.adaptive_hardened)},
            {"hardened", tokens(o.hardened)},
            {"attacked", tokens(o.attacked)},
            {"predicted_vulnerable", tokens(o.predicted_vulnerable)},
            {"impact_ranking", ranking},
            {"cascade_steps", o.trace.steps.size()},
            {"damage_hardened", o.damage_hardened},
            {"damage_unhardened", o.damage_unhardened},
            {"operational_before", o.operational_before},
            {"operational_after_hardened", o.operational_after_hardened},
            {"operational_after_unhardened", o.operational_after_unhardened},
            {"payoffs",
             {{"defender_hardened", o.payoff.defender_hardened},
              {"defender_not_hardened", o.payoff.defender_not_hardened},
              {"attacker_hardened", o.payoff.attacker_hardened},
              {"attacker_not_hardened", o.payoff.attacker_not_hardened}}}};
}

}  // namespace gridcon
