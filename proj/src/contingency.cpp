#include "gridcon/contingency.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "evaluator.hpp"

namespace gridcon {

namespace detail {

SetEvaluator::SetEvaluator(const Network& network, const SolverOptions& options)
    : engine_(network, options.model), failed_count_(options.metric == DamageMetric::FailedCount) {
    baseline_ = engine_.initial_states();
    protection_ = engine_.protection(network.hardened(), options.mode, baseline_);
    Workspace ws;
    engine_.settle(baseline_, protection_, ws, std::nullopt);
}

bool SetEvaluator::protected_entity(std::uint32_t i) const {
    return protection_.clamped[i] || (!protection_.isolated.empty() && protection_.isolated[i]);
}

std::vector<std::uint32_t> SetEvaluator::eligible(const std::set<EntityId>& excluded) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < engine_.size(); ++i) {
        if (!engine_.is_node(i) || baseline_[i] == 0 || protected_entity(i)) continue;
        if (excluded.contains(engine_.entity(i))) continue;
        out.push_back(i);
    }
    return out;
}

void SetEvaluator::run(const std::vector<std::uint32_t>& set, Workspace& ws, std::vector<std::uint8_t>& out) const {
    out = baseline_;
    std::vector<std::uint32_t> seed;
    for (auto i : set) {
        if (out[i] != 0) seed.push_back(i);
        out[i] = 0;
    }
    std::sort(seed.begin(), seed.end());
    engine_.settle(out, protection_, ws, seed);
}

long SetEvaluator::damage(const std::vector<std::uint32_t>& set, Workspace& ws,
                          std::vector<std::uint8_t>& scratch) const {
    run(set, ws, scratch);
    return engine_.damage(baseline_, scratch, failed_count_);
}

long SetEvaluator::damage(const std::vector<std::uint32_t>& set) const {
    Workspace ws;
    std::vector<std::uint8_t> scratch;
    return damage(set, ws, scratch);
}

std::vector<EntitySet> to_sets(const Engine& engine, std::vector<std::vector<std::uint32_t>> sets) {
    for (auto& s : sets) std::sort(s.begin(), s.end());
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    std::vector<EntitySet> out;
    out.reserve(sets.size());
    for (const auto& s : sets) {
        EntitySet e;
        for (auto i : s) e.push_back(engine.entity(i));
        out.push_back(std::move(e));
    }
    return out;
}

unsigned worker_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GRIDCON_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

std::string to_string(Solver solver) { return solver == Solver::Exact ? "exact" : "heuristic"; }

Solver parse_solver(std::string_view text) {
    if (text == "exact") return Solver::Exact;
    if (text == "heuristic") return Solver::Heuristic;
    throw std::invalid_argument("unknown solver '" + std::string(text) + "'");
}

std::vector<EntityId> eligible_entities(const Network& network, const SolverOptions& options) {
    detail::SetEvaluator ev(network, options);
    std::vector<EntityId> out;
    for (auto i : ev.eligible(options.excluded)) out.push_back(ev.engine().entity(i));
    return out;
}

long evaluate_set(const Network& network, const EntitySet& set, const SolverOptions& options) {
    detail::SetEvaluator ev(network, options);
    std::vector<std::uint32_t> idx;
    for (const auto& e : set) idx.push_back(ev.engine().index(e));
    return ev.damage(idx);
}

namespace {

constexpr double kMaxSubsets = 2e8;

double binomial(std::size_t n, std::size_t k) {
    double r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// Advances `c` to the next k-combination of [0, n); false when exhausted.
bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
    const std::size_t k = c.size();
    std::size_t i = k;
    while (i > 0) {
        --i;
        if (c[i] != i + n - k) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

struct Best {
    long damage = -1;
    std::vector<std::vector<std::uint32_t>> sets;

    void offer(long d, const std::vector<std::uint32_t>& s) {
        if (d > damage) {
            damage = d;
            sets.clear();
        }
        if (d == damage) sets.push_back(s);
    }
};

}  // namespace

ContingencyResult exact_k_contingency(const Network& network, int k, const SolverOptions& options) {
    auto start = std::chrono::steady_clock::now();
    detail::SetEvaluator ev(network, options);
    const std::vector<std::uint32_t> pool = ev.eligible(options.excluded);
    if (k < 1) throw ContingencyError("k must be positive");
    if (static_cast<std::size_t>(k) > pool.size()) {
        throw ContingencyError("k = " + std::to_string(k) + " exceeds the " + std::to_string(pool.size()) +
                               " eligible entities");
    }
    const std::size_t n = pool.size();
    const auto kk = static_cast<std::size_t>(k);
    if (binomial(n, kk) > kMaxSubsets) {
        throw ContingencyError("exact search over C(" + std::to_string(n) + ", " + std::to_string(k) +
                               ") subsets is too large; use the heuristic solver");
    }

    const unsigned workers = static_cast<unsigned>(
        std::min<double>(detail::worker_count(options.threads), std::max(1.0, binomial(n, kk) / 64)));
    std::vector<Best> partial(workers);
    auto work = [&](unsigned id) {
        Workspace ws;
        std::vector<std::uint8_t> scratch;
        std::vector<std::uint32_t> set(kk);
        std::vector<std::size_t> c(kk);
        for (std::size_t i = 0; i < kk; ++i) c[i] = i;
        std::size_t counter = 0;
        do {
            if (counter++ % workers != id) continue;
            for (std::size_t i = 0; i < kk; ++i) set[i] = pool[c[i]];
            partial[id].offer(ev.damage(set, ws, scratch), set);
        } while (next_combination(c, n));
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned id = 0; id < workers; ++id) threads.emplace_back(work, id);
        for (auto& t : threads) t.join();
    }

    Best best;
    for (auto& p : partial) {
        for (auto& s : p.sets) best.offer(p.damage, s);
    }

    ContingencyResult result;
    result.k = k;
    result.metric = options.metric;
    result.solver = Solver::Exact;
    result.damage_value = best.damage;
    result.best_sets = detail::to_sets(ev.engine(), std::move(best.sets));
    result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

ContingencyResult k_contingency(const Network& network, int k, Solver solver, const SolverOptions& options) {
    return solver == Solver::Exact ? exact_k_contingency(network, k, options)
                                   : heuristic_k_contingency(network, k, options);
}

std::string to_string(Color color) {
    switch (color) {
    case Color::White: return "white";
    case Color::Yellow: return "yellow";
    case Color::Blue: return "blue";
    case Color::Green: return "green";
    case Color::Pink: return "pink";
    case Color::Red: return "red";
    case Color::Grey: return "grey";
    }
    return "white";
}

Color ColoringState::of(EntityId id) const {
    auto it = color.find(id);
    return it == color.end() ? Color::White : it->second;
}

std::vector<EntityId> ColoringState::with(Color c) const {
    std::vector<EntityId> out;
    for (const auto& [id, col] : color) {
        if (col == c) out.push_back(id);
    }
    return out;
}

ColoringState color_base(const Network& network) {
    ColoringState s;
    const auto& ann = network.annotations();
    for (const auto& id : network.entities()) {
        if (!id.is_node()) continue;
        bool gen = ann.generators.contains(id);
        bool pmu = ann.pmu_buses.contains(id);
        s.color[id] = gen && pmu ? Color::Green : gen ? Color::Yellow : pmu ? Color::Blue : Color::White;
    }
    return s;
}

nlohmann::json to_json(const ContingencyResult& result) {
    nlohmann::json sets = nlohmann::json::array();
    for (const auto& s : result.best_sets) {
        nlohmann::json one = nlohmann::json::array();
        for (const auto& e : s) one.push_back(e.token());
        sets.push_back(one);
    }
    return {{"k", result.k},
            {"damage", result.damage_value},
            {"metric", to_string(result.metric)},
            {"solver", to_string(result.solver)},
            {"sets", sets},
            {"elapsed_ms", result.elapsed_ms}};
}

}  // namespace gridcon
