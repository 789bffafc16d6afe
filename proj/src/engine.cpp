#include "gridcon/engine.hpp"

#include <algorithm>

namespace gridcon {

Engine::Engine(const Network& network, Model model) : model_(model) {
    entities_.assign(network.entities().begin(), network.entities().end());
    const std::size_t n = entities_.size();
    node_.resize(n);
    initial_.resize(n);
    link_.assign(n, {-1, -1});
    dependents_.resize(n);
    rule_begin_.reserve(n + 1);

    for (std::size_t i = 0; i < n; ++i) {
        node_[i] = entities_[i].is_node() ? 1 : 0;
        initial_[i] = network.state(entities_[i]).value();
        if (model_ == Model::Iim && initial_[i] == OperationalState::kReduced) {
            throw EvalError("IIM network has reduced state on " + entities_[i].token());
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        rule_begin_.push_back(static_cast<std::uint32_t>(nodes_.size()));
        auto it = network.idrs().find(entities_[i]);
        if (it != network.idrs().end()) {
            compile(it->second.expr, nodes_);
            for (const auto& leaf : it->second.expr.leaves()) dependents_[index(leaf)].push_back(static_cast<std::uint32_t>(i));
            continue;
        }
        auto link = network.links().find(entities_[i]);
        if (link != network.links().end()) {
            std::uint32_t a = index(link->second.first);
            std::uint32_t b = index(link->second.second);
            link_[i] = {a, b};
            dependents_[a].push_back(static_cast<std::uint32_t>(i));
            dependents_[b].push_back(static_cast<std::uint32_t>(i));
        }
    }
    rule_begin_.push_back(static_cast<std::uint32_t>(nodes_.size()));
    for (auto& d : dependents_) {
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
    }
}

void Engine::compile(const IdrExpression& e, std::vector<Node>& out) const {
    if (e.is_leaf()) {
        out.push_back({IdrExpression::Op::Leaf, index(e.entity())});
        return;
    }
    for (const auto& c : e.children()) compile(c, out);
    out.push_back({e.op(), static_cast<std::uint32_t>(e.children().size())});
}

std::optional<std::uint32_t> Engine::find(EntityId id) const {
    auto it = std::lower_bound(entities_.begin(), entities_.end(), id);
    if (it == entities_.end() || *it != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - entities_.begin());
}

std::uint32_t Engine::index(EntityId id) const {
    auto i = find(id);
    if (!i) throw NetworkError("unknown entity " + id.token());
    return *i;
}

bool Engine::has_rule(std::size_t i) const {
    return rule_begin_[i] != rule_begin_[i + 1] || link_[i].first >= 0;
}

Protection Engine::protection(const std::set<EntityId>& hardened, HardeningMode mode,
                              const std::vector<std::uint8_t>& states) const {
    Protection p = no_protection();
    for (const auto& id : hardened) {
        std::uint32_t i = index(id);
        if (mode == HardeningMode::Clamp) {
            p.clamped[i] = 1;
        } else {
            if (p.isolated.empty()) {
                p.isolated.assign(size(), 0);
                p.frozen.assign(size(), 0);
            }
            p.isolated[i] = 1;
            p.frozen[i] = states[i];
        }
    }
    return p;
}

Protection Engine::no_protection() const {
    Protection p;
    p.clamped.assign(size(), 0);
    return p;
}

std::uint8_t Engine::evaluate(std::uint32_t i, const std::vector<std::uint8_t>& cur, const Protection& p,
                              Workspace& ws) const {
    const std::uint32_t begin = rule_begin_[i];
    const std::uint32_t end = rule_begin_[i + 1];
    if (begin == end) {
        auto [a, b] = link_[i];
        if (a < 0) return cur[i];
        bool dead = read(static_cast<std::uint32_t>(a), cur, p) == 0 && read(static_cast<std::uint32_t>(b), cur, p) == 0;
        return dead ? OperationalState::kFailed : cur[i];
    }
    auto& st = ws.stack;
    st.clear();
    for (std::uint32_t k = begin; k < end; ++k) {
        const Node& node = nodes_[k];
        if (node.op == IdrExpression::Op::Leaf) {
            st.push_back(read(node.arg, cur, p));
            continue;
        }
        std::size_t base = st.size() - node.arg;
        std::uint8_t v = apply_operator(node.op, st.data() + base, node.arg, model_);
        st.resize(base);
        st.push_back(v);
    }
    return st.back();
}

bool Engine::step(std::vector<std::uint8_t>& cur, const Protection& p, Workspace& ws, bool full) const {
    ws.pending.clear();
    auto visit = [&](std::uint32_t i) {
        if (cur[i] == 0 || p.clamped[i]) return;
        std::uint8_t v = evaluate(i, cur, p, ws);
        if (v < cur[i]) ws.pending.emplace_back(i, v);
    };
    if (full) {
        for (std::uint32_t i = 0; i < size(); ++i) visit(i);
    } else {
        if (ws.stamp.size() != size()) {
            ws.stamp.assign(size(), 0);
            ws.epoch = 0;
        }
        if (++ws.epoch == 0) {
            std::fill(ws.stamp.begin(), ws.stamp.end(), 0);
            ws.epoch = 1;
        }
        ws.todo.clear();
        for (std::uint32_t c : ws.changed) {
            for (std::uint32_t d : dependents_[c]) {
                if (ws.stamp[d] != ws.epoch) {
                    ws.stamp[d] = ws.epoch;
                    ws.todo.push_back(d);
                }
            }
        }
        for (std::uint32_t i : ws.todo) visit(i);
    }
    ws.changed.clear();
    for (auto [i, v] : ws.pending) {
        cur[i] = v;
        ws.changed.push_back(i);
    }
    std::sort(ws.changed.begin(), ws.changed.end());
    return !ws.changed.empty();
}

std::size_t Engine::settle(std::vector<std::uint8_t>& cur, const Protection& p, Workspace& ws,
                           const std::optional<std::vector<std::uint32_t>>& seed) const {
    std::size_t steps = 0;
    bool full = !seed.has_value();
    if (seed) ws.changed = *seed;
    while (step(cur, p, ws, full)) {
        ++steps;
        full = false;
    }
    return steps;
}

long Engine::damage(const std::vector<std::uint8_t>& before, const std::vector<std::uint8_t>& after,
                    bool failed_count) const {
    long total = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (!node_[i]) continue;
        if (failed_count) {
            total += (after[i] == 0 && before[i] > 0) ? 1 : 0;
        } else {
            total += static_cast<long>(before[i]) - static_cast<long>(after[i]);
        }
    }
    return total;
}

}  // namespace gridcon
