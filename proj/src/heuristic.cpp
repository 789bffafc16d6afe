#include <algorithm>
#include <chrono>

#include "evaluator.hpp"
#include "gridcon/contingency.hpp"

namespace gridcon {

namespace detail {

Topology::Topology(const Network& network, const Engine& engine)
    : pp(engine.size()), pc(engine.size()), cc(engine.size()) {
    auto add = [&](auto& adj, const std::set<EntityPair>& edges) {
        for (const auto& [a, b] : edges) {
            auto ia = engine.index(a);
            auto ib = engine.index(b);
            adj[ia].push_back(ib);
            adj[ib].push_back(ia);
        }
    };
    add(pp, network.edges(EdgeClass::PP));
    add(pc, network.edges(EdgeClass::PC));
    add(cc, network.edges(EdgeClass::CC));
    for (auto* adj : {&pp, &pc, &cc}) {
        for (auto& v : *adj) std::sort(v.begin(), v.end());
    }
    for (std::uint32_t i = 0; i < engine.size(); ++i) {
        EntityId id = engine.entity(i);
        if (id.is_power_vertex()) buses.push_back(i);
        if (id.is_comm_vertex()) comm.push_back(i);
    }
}

std::vector<std::uint32_t> covered_comm_vertices(const Topology& topo, const std::vector<char>& p_marked,
                                                 const std::vector<char>& c_marked) {
    std::vector<std::uint32_t> out;
    auto all_marked = [](const std::vector<std::uint32_t>& adj, const std::vector<char>& marked) {
        return !adj.empty() && std::all_of(adj.begin(), adj.end(), [&](std::uint32_t j) { return marked[j] != 0; });
    };
    for (auto c : topo.comm) {
        if (all_marked(topo.pc[c], p_marked) || all_marked(topo.cc[c], c_marked)) out.push_back(c);
    }
    return out;
}

}  // namespace detail

namespace {

using Index = std::uint32_t;
using Set = std::vector<Index>;
using Mask = std::vector<char>;

constexpr std::size_t kMaxCombinations = 200000;
constexpr int kImprovePasses = 4;

struct Scored {
    long damage = -1;
    std::vector<Set> sets;

    void offer(long d, Set s) {
        std::sort(s.begin(), s.end());
        if (d > damage) {
            damage = d;
            sets.clear();
        }
        if (d == damage && std::find(sets.begin(), sets.end(), s) == sets.end()) sets.push_back(std::move(s));
    }
};

class Heuristic {
public:
    Heuristic(const Network& network, const SolverOptions& options)
        : ev_(network, options), topo_(network, ev_.engine()), base_(color_base(network)) {
        const auto& eng = ev_.engine();
        eligible_.assign(eng.size(), 0);
        for (auto i : ev_.eligible(options.excluded)) {
            eligible_[i] = 1;
            ++eligible_count_;
        }
        alive_.assign(eng.size(), 0);
        for (auto b : topo_.buses) alive_[b] = ev_.baseline()[b] > 0 ? 1 : 0;
        failed_.assign(eng.size(), 0);
        for (Index i = 0; i < eng.size(); ++i) failed_[i] = ev_.baseline()[i] == 0 ? 1 : 0;
    }

    ContingencyResult solve(int k, HeuristicTrace* trace) {
        if (k < 1) throw ContingencyError("k must be positive");
        if (static_cast<std::size_t>(k) > eligible_count_) {
            throw ContingencyError("k = " + std::to_string(k) + " exceeds the " + std::to_string(eligible_count_) +
                                   " eligible entities");
        }
        Mask banned(alive_.size(), 0);
        Scored red = step3(alive_, banned, trace ? &trace->pink : nullptr);
        if (red.sets.empty()) throw ContingencyError("no eligible power vertex to seed the heuristic");
        if (trace) {
            for (const auto& s : red.sets) trace->red.push_back(ev_.engine().entity(s[0]));
        }

        Scored out;
        if (k == 1) {
            out = red;
        } else if (k == 2) {
            out = step4(alive_, banned, &red, trace ? &trace->grey : nullptr);
        } else {
            out = improve(step5(k));
        }

        if (trace) {
            trace->final_colors = base_;
            for (const auto& r : trace->red) trace->final_colors.color[r] = Color::Red;
        }
        ContingencyResult result;
        result.k = k;
        result.damage_value = out.damage;
        result.best_sets = detail::to_sets(ev_.engine(), std::move(out.sets));
        return result;
    }

private:
    long score(const Set& s) { return ev_.damage(s, ws_, scratch_); }

    bool usable(Index i, const Mask& banned) const { return eligible_[i] && !banned[i]; }

    std::size_t degree(Index b, const Mask& alive) const {
        std::size_t d = 0;
        for (auto n : topo_.pp[b]) d += alive[n] ? 1 : 0;
        return d;
    }

    // K=1: pendant neighbors, else minimum-degree vertices, scored singly.
    Scored step3(const Mask& alive, const Mask& banned, std::vector<EntityId>* pink_out) {
        std::vector<Index> pink;
        for (auto b : topo_.buses) {
            if (!alive[b] || degree(b, alive) != 1) continue;
            for (auto n : topo_.pp[b]) {
                if (alive[n] && usable(n, banned)) pink.push_back(n);
            }
        }
        if (pink.empty()) {
            std::size_t best = SIZE_MAX;
            for (auto b : topo_.buses) {
                if (!alive[b] || !usable(b, banned)) continue;
                std::size_t d = degree(b, alive);
                if (d < best) {
                    best = d;
                    pink.clear();
                }
                if (d == best) pink.push_back(b);
            }
        }
        std::sort(pink.begin(), pink.end());
        pink.erase(std::unique(pink.begin(), pink.end()), pink.end());
        if (pink_out) {
            for (auto p : pink) pink_out->push_back(ev_.engine().entity(p));
        }
        Scored red;
        for (auto p : pink) red.offer(score({p}), {p});
        return red;
    }

    // K=2: red x {green, yellow, blue}, grey pairs, red x covered comm vertices.
    Scored step4(const Mask& alive, const Mask& banned, const Scored* red_in, std::vector<EntityId>* grey_out) {
        Scored red = red_in ? *red_in : step3(alive, banned, nullptr);
        std::vector<Index> reds;
        for (const auto& s : red.sets) reds.push_back(s[0]);

        std::vector<Set> candidates;
        for (auto b : topo_.buses) {
            if (!alive[b] || !usable(b, banned)) continue;
            Color c = base_.of(ev_.engine().entity(b));
            if (c != Color::Yellow && c != Color::Blue && c != Color::Green) continue;
            for (auto r : reds) {
                if (r != b) candidates.push_back({r, b});
            }
        }

        std::vector<Index> grey;
        for (auto b : topo_.buses) {
            if (!alive[b] || degree(b, alive) != 2) continue;
            for (auto n : topo_.pp[b]) {
                if (alive[n] && usable(n, banned)) grey.push_back(n);
            }
        }
        std::sort(grey.begin(), grey.end());
        grey.erase(std::unique(grey.begin(), grey.end()), grey.end());
        if (grey_out) {
            for (auto g : grey) grey_out->push_back(ev_.engine().entity(g));
        }
        for (std::size_t i = 0; i < grey.size(); ++i) {
            for (std::size_t j = i + 1; j < grey.size(); ++j) candidates.push_back({grey[i], grey[j]});
        }

        Mask marked = failed_;
        for (auto r : reds) marked[r] = 1;
        for (auto c : detail::covered_comm_vertices(topo_, marked, marked)) {
            if (!usable(c, banned)) continue;
            for (auto r : reds) candidates.push_back({r, c});
        }

        if (candidates.empty()) {
            for (auto r : reds) {
                for (Index i = 0; i < alive.size(); ++i) {
                    if (i != r && usable(i, banned)) candidates.push_back({r, i});
                }
            }
        }
        for (auto& c : candidates) std::sort(c.begin(), c.end());
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

        Scored best;
        for (auto& c : candidates) best.offer(score(c), c);
        return best;
    }

    // K>2: collect winning pairs on a shrinking graph and combine them.
    Scored step5(int k) {
        const std::size_t half = static_cast<std::size_t>(k) / 2;
        Mask alive = alive_;
        Mask banned(alive_.size(), 0);
        std::vector<Set> tlist1;
        while (tlist1.size() < half) {
            Scored round = step4(alive, banned, nullptr, nullptr);
            if (round.sets.empty()) break;
            for (const auto& s : round.sets) {
                for (auto e : s) {
                    alive[e] = 0;
                    banned[e] = 1;
                }
                tlist1.push_back(s);
            }
        }

        Scored tlist2 = combine(tlist1, half);
        if (tlist2.sets.empty()) {
            Set seed;
            for (const auto& p : tlist1) {
                if (seed.size() + 2 > 2 * half) break;
                if (std::none_of(p.begin(), p.end(),
                                 [&](Index e) { return std::find(seed.begin(), seed.end(), e) != seed.end(); })) {
                    seed.insert(seed.end(), p.begin(), p.end());
                }
            }
            return greedy_fill(seed, static_cast<std::size_t>(k));
        }
        if (k % 2 == 0) return tlist2;

        // Odd K: one more red vertex on the grid left standing after each pair set.
        Scored out;
        std::vector<std::uint8_t> final_states;
        for (const auto& s : tlist2.sets) {
            ev_.run(s, ws_, final_states);
            Mask residual(alive_.size(), 0);
            Mask used(alive_.size(), 0);
            for (auto b : topo_.buses) residual[b] = alive_[b] && final_states[b] > 0 ? 1 : 0;
            for (Index i = 0; i < used.size(); ++i) used[i] = final_states[i] == 0 ? 1 : 0;
            for (auto e : s) used[e] = 1;
            for (const auto& r : step3(residual, used, nullptr).sets) {
                Set full = s;
                full.push_back(r[0]);
                out.offer(score(full), full);
            }
            Scored filled = greedy_fill(s, static_cast<std::size_t>(k));
            for (auto& f : filled.sets) out.offer(filled.damage, f);
        }
        return out;
    }

    // Replaces one member at a time while that raises damage, starting from
    // each set of the tie group. Bounded to a few passes.
    Scored improve(Scored start) {
        Scored out;
        for (auto s : start.sets) {
            long d = score(s);
            for (int pass = 0; pass < kImprovePasses; ++pass) {
                bool better = false;
                for (std::size_t slot = 0; slot < s.size(); ++slot) {
                    for (Index i = 0; i < eligible_.size(); ++i) {
                        if (!eligible_[i] || std::find(s.begin(), s.end(), i) != s.end()) continue;
                        Set trial = s;
                        trial[slot] = i;
                        long td = score(trial);
                        if (td > d) {
                            d = td;
                            s = trial;
                            better = true;
                        }
                    }
                }
                if (!better) break;
            }
            out.offer(d, s);
        }
        return out;
    }

    // Every choice of `half` pairwise-disjoint pairs, scored as one set.
    Scored combine(const std::vector<Set>& pairs, std::size_t half) {
        Scored out;
        if (pairs.size() < half || half == 0) return out;
        std::vector<std::size_t> pick;
        std::size_t evaluated = 0;
        Set current;
        auto rec = [&](auto&& self, std::size_t from) -> void {
            if (evaluated >= kMaxCombinations) return;
            if (pick.size() == half) {
                ++evaluated;
                out.offer(score(current), current);
                return;
            }
            for (std::size_t i = from; i < pairs.size(); ++i) {
                const Set& p = pairs[i];
                bool clash = std::any_of(p.begin(), p.end(), [&](Index e) {
                    return std::find(current.begin(), current.end(), e) != current.end();
                });
                if (clash) continue;
                pick.push_back(i);
                current.insert(current.end(), p.begin(), p.end());
                self(self, i + 1);
                current.resize(current.size() - p.size());
                pick.pop_back();
            }
        };
        rec(rec, 0);
        return out;
    }

    // Extends `seed` one entity at a time by the best single addition.
    Scored greedy_fill(Set seed, std::size_t k) {
        Scored out;
        while (seed.size() < k) {
            long best = -1;
            Index pick = 0;
            for (Index i = 0; i < eligible_.size(); ++i) {
                if (!eligible_[i] || std::find(seed.begin(), seed.end(), i) != seed.end()) continue;
                Set trial = seed;
                trial.push_back(i);
                long d = score(trial);
                if (d > best) {
                    best = d;
                    pick = i;
                }
            }
            if (best < 0) break;
            seed.push_back(pick);
        }
        if (seed.size() == k) out.offer(score(seed), seed);
        return out;
    }

    detail::SetEvaluator ev_;
    detail::Topology topo_;
    ColoringState base_;
    Mask eligible_;
    std::size_t eligible_count_ = 0;
    Mask alive_;
    Mask failed_;
    Workspace ws_;
    std::vector<std::uint8_t> scratch_;
};

}  // namespace

ContingencyResult heuristic_k_contingency(const Network& network, int k, const SolverOptions& options,
                                          HeuristicTrace* trace) {
    auto start = std::chrono::steady_clock::now();
    Heuristic h(network, options);
    ContingencyResult result = h.solve(k, trace);
    result.metric = options.metric;
    result.solver = Solver::Heuristic;
    result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace gridcon
