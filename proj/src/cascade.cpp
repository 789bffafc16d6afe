#include "gridcon/cascade.hpp"

#include <sstream>

namespace gridcon {

std::string to_string(DamageMetric metric) {
    return metric == DamageMetric::StateLoss ? "state-loss" : "failed-count";
}

DamageMetric parse_metric(std::string_view text) {
    if (text == "state-loss") return DamageMetric::StateLoss;
    if (text == "failed-count") return DamageMetric::FailedCount;
    throw std::invalid_argument("unknown metric '" + std::string(text) + "'");
}

std::string to_string(Model model) { return model == Model::Miim ? "miim" : "iim"; }

Model parse_model(std::string_view text) {
    if (text == "miim") return Model::Miim;
    if (text == "iim") return Model::Iim;
    throw std::invalid_argument("unknown model '" + std::string(text) + "'");
}

std::string to_string(HardeningMode mode) { return mode == HardeningMode::Clamp ? "clamp" : "isolate"; }

HardeningMode parse_hardening_mode(std::string_view text) {
    if (text == "clamp") return HardeningMode::Clamp;
    if (text == "isolate") return HardeningMode::Isolate;
    throw std::invalid_argument("unknown hardening mode '" + std::string(text) + "'");
}

namespace {

StateTable to_table(const Engine& engine, const std::vector<std::uint8_t>& v) {
    StateTable out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.emplace_hint(out.end(), engine.entity(i), OperationalState::from_int(v[i]));
    }
    return out;
}

std::vector<std::uint8_t> from_table(const Engine& engine, const StateTable& table) {
    std::vector<std::uint8_t> v(engine.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto it = table.find(engine.entity(i));
        if (it == table.end()) throw EvalError("no state for entity " + engine.entity(i).token());
        v[i] = it->second.value();
    }
    return v;
}

}  // namespace

std::pair<StateTable, std::set<EntityId>> cascade_step(const Network& network, const StateTable& current,
                                                       const CascadeOptions& options) {
    Engine engine(network, options.model);
    std::vector<std::uint8_t> cur = from_table(engine, current);
    Protection p = engine.protection(network.hardened(), options.mode, cur);
    Workspace ws;
    engine.step(cur, p, ws, true);
    std::set<EntityId> changed;
    for (auto i : ws.changed) changed.insert(engine.entity(i));
    return {to_table(engine, cur), changed};
}

CascadeTrace run_cascade(const Network& network, const std::set<EntityId>& initial_failures,
                         const std::set<EntityId>& hardened, const CascadeOptions& options) {
    Engine engine(network, options.model);
    CascadeTrace trace;
    trace.initial_failures = initial_failures;
    trace.hardened = network.hardened();
    trace.hardened.insert(hardened.begin(), hardened.end());
    for (const auto& f : initial_failures) {
        (void)engine.index(f);  // throws on unknown entities
        if (trace.hardened.contains(f)) throw NetworkError("cannot fail hardened entity " + f.token());
    }

    std::vector<std::uint8_t> cur = engine.initial_states();
    trace.before = to_table(engine, cur);
    Protection p = engine.protection(trace.hardened, options.mode, cur);

    CascadeStep first;
    for (const auto& f : initial_failures) {
        std::uint32_t i = engine.index(f);
        if (cur[i] != 0) first.changed.insert(f);
        cur[i] = 0;
    }
    first.states = to_table(engine, cur);
    trace.steps.push_back(std::move(first));

    Workspace ws;
    bool full = true;
    while (engine.step(cur, p, ws, full)) {
        full = false;
        CascadeStep s;
        s.t = trace.steps.size();
        s.states = to_table(engine, cur);
        for (auto i : ws.changed) s.changed.insert(engine.entity(i));
        trace.steps.push_back(std::move(s));
    }
    return trace;
}

long damage(const CascadeTrace& trace, DamageMetric metric) {
    long total = 0;
    for (const auto& [id, after] : trace.final_states()) {
        if (!id.is_node()) continue;
        auto it = trace.before.find(id);
        std::uint8_t b = it == trace.before.end() ? OperationalState::kFull : it->second.value();
        if (metric == DamageMetric::FailedCount) {
            total += (after.value() == 0 && b > 0) ? 1 : 0;
        } else {
            total += static_cast<long>(b) - static_cast<long>(after.value());
        }
    }
    return total;
}

Network settled(const Network& network, const CascadeOptions& options) {
    Engine engine(network, options.model);
    std::vector<std::uint8_t> cur = engine.initial_states();
    Protection p = engine.protection(network.hardened(), options.mode, cur);
    Workspace ws;
    engine.settle(cur, p, ws, std::nullopt);
    Network out = network;
    for (std::size_t i = 0; i < cur.size(); ++i) {
        out.set_state(engine.entity(i), OperationalState::from_int(cur[i]));
    }
    return out;
}

nlohmann::json trace_to_json(const CascadeTrace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : trace.steps) {
        nlohmann::json states = nlohmann::json::object();
        for (const auto& [id, v] : s.states) states[id.token()] = v.value();
        nlohmann::json changed = nlohmann::json::array();
        for (const auto& id : s.changed) changed.push_back(id.token());
        steps.push_back({{"t", s.t}, {"states", states}, {"changed", changed}});
    }
    return steps;
}

std::string trace_to_csv(const CascadeTrace& trace) {
    std::ostringstream out;
    out << "t,entity,state\n";
    for (const auto& s : trace.steps) {
        for (const auto& [id, v] : s.states) out << s.t << ',' << id.token() << ',' << int(v.value()) << '\n';
    }
    return out.str();
}

}  // namespace gridcon
