#include "gridcon/self_updating.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <deque>

#include "evaluator.hpp"

namespace gridcon {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<FailureEvent> parse_events(std::string_view csv) {
    std::vector<FailureEvent> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t end = csv.find('\n', pos);
        std::string_view line = trim(csv.substr(pos, end == std::string_view::npos ? csv.npos : end - pos));
        pos = end == std::string_view::npos ? csv.size() + 1 : end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        auto fail = [&](const std::string& what) {
            throw std::invalid_argument("events line " + std::to_string(line_no) + ": " + what);
        };
        std::string_view fields[3];
        std::size_t start = 0;
        for (int f = 0; f < 3; ++f) {
            std::size_t comma = line.find(',', start);
            if (f < 2 && comma == std::string_view::npos) fail("expected time_ms,entity,new_state");
            fields[f] = trim(line.substr(start, f < 2 ? comma - start : line.npos));
            start = comma + 1;
        }
        if (fields[2].find(',') != std::string_view::npos) fail("too many fields");
        if (out.empty() && fields[0] == "time_ms") continue;

        FailureEvent ev;
        auto [p, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), ev.time_ms);
        if (ec != std::errc{} || p != fields[0].data() + fields[0].size() || ev.time_ms < 0) fail("bad time");
        try {
            ev.entity = EntityId::parse(fields[1]);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        long state = -1;
        auto [q, ec2] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), state);
        if (ec2 != std::errc{} || q != fields[2].data() + fields[2].size() || state < 0 || state > 2) {
            fail("state must be 0, 1 or 2");
        }
        ev.new_state = OperationalState::from_int(state);
        if (!out.empty() && ev.time_ms < out.back().time_ms) fail("events are not ordered by time");
        out.push_back(ev);
    }
    return out;
}

struct SelfUpdatingList::Cache {
    std::unique_ptr<Engine> engine;
    std::unique_ptr<detail::Topology> topo;
};

SelfUpdatingList::SelfUpdatingList(Network network, int k, Solver solver, SolverOptions options, double budget_ms)
    : live_(std::move(network)),
      k_(k),
      solver_(solver),
      options_(std::move(options)),
      budget_ms_(budget_ms),
      cache_(std::make_unique<Cache>()) {}

SelfUpdatingList::~SelfUpdatingList() = default;

ListSnapshot SelfUpdatingList::apply(const FailureEvent& event) {
    auto start = std::chrono::steady_clock::now();
    if (!live_.contains(event.entity)) throw NetworkError("event references unknown entity " + event.entity.token());
    if (options_.model == Model::Iim && event.new_state == OperationalState::reduced()) {
        throw NetworkError("IIM events cannot carry reduced state");
    }
    if (time_ms_ < event.time_ms) time_ms_ = event.time_ms;
    live_.set_state(event.entity, event.new_state);
    if (event.new_state == OperationalState::failed()) {
        event_failed_.insert(event.entity);
        presumed_.erase(event.entity);
        if (live_.idrs().contains(event.entity)) {
            live_.remove_idr(event.entity);
            cache_->engine.reset();
        }
    } else {
        event_failed_.erase(event.entity);
    }
    ListSnapshot s = recompute(event);
    s.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    s.over_budget = s.elapsed_ms > budget_ms_;
    return s;
}

ListSnapshot SelfUpdatingList::tick() {
    auto start = std::chrono::steady_clock::now();
    if (!cache_->engine) cache_->engine = std::make_unique<Engine>(live_, options_.model);
    const Engine& eng = *cache_->engine;

    std::vector<std::uint8_t> cur(eng.size());
    std::vector<char> prev_dead(eng.size(), 0);
    for (std::uint32_t i = 0; i < eng.size(); ++i) {
        cur[i] = live_.state(eng.entity(i)).value();
        prev_dead[i] = cur[i] == 0 || presumed_.contains(eng.entity(i));
    }
    Protection p = eng.protection(live_.hardened(), options_.mode, cur);
    Workspace ws;
    eng.step(cur, p, ws, true);
    for (auto i : ws.changed) live_.set_state(eng.entity(i), OperationalState::from_int(cur[i]));
    ++time_ms_;
    advance_presumed_cut_off(prev_dead);

    ListSnapshot s = recompute(std::nullopt);
    s.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    s.over_budget = s.elapsed_ms > budget_ms_;
    return s;
}

ListSnapshot SelfUpdatingList::snapshot() {
    auto start = std::chrono::steady_clock::now();
    ListSnapshot s = recompute(std::nullopt);
    s.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    s.over_budget = s.elapsed_ms > budget_ms_;
    return s;
}

void SelfUpdatingList::advance_presumed_cut_off(const std::vector<char>& prev_dead) {
    if (!cache_->engine) cache_->engine = std::make_unique<Engine>(live_, options_.model);
    const Engine& eng = *cache_->engine;
    if (!cache_->topo) cache_->topo = std::make_unique<detail::Topology>(live_, eng);
    const auto& topo = *cache_->topo;

    // Reachability from live control-center terminals over live E_CC edges.
    std::vector<char> reached(eng.size(), 0);
    std::deque<std::uint32_t> queue;
    for (int cc : live_.annotations().control_centers) {
        auto it = live_.annotations().substations.find(cc);
        if (it == live_.annotations().substations.end()) continue;
        for (const auto& m : it->second.comm_entities()) {
            auto i = eng.find(m);
            if (i && live_.state(m).value() > 0 && !reached[*i]) {
                reached[*i] = 1;
                queue.push_back(*i);
            }
        }
    }
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (auto n : topo.cc[v]) {
            if (!reached[n] && live_.state(eng.entity(n)).value() > 0) {
                reached[n] = 1;
                queue.push_back(n);
            }
        }
    }

    std::vector<std::uint32_t> frontier;
    for (auto c : topo.comm) {
        EntityId id = eng.entity(c);
        if (reached[c] || presumed_.contains(id) || event_failed_.contains(id)) continue;
        bool touches = std::any_of(topo.cc[c].begin(), topo.cc[c].end(), [&](std::uint32_t n) { return prev_dead[n] != 0; });
        if (touches) frontier.push_back(c);
    }
    for (auto c : frontier) presumed_.insert(eng.entity(c));

    // Close over vertices whose every E_CC neighbor is failed or presumed cut off.
    bool grew = !frontier.empty();
    while (grew) {
        grew = false;
        for (auto c : topo.comm) {
            EntityId id = eng.entity(c);
            if (presumed_.contains(id) || event_failed_.contains(id) || topo.cc[c].empty()) continue;
            bool all = std::all_of(topo.cc[c].begin(), topo.cc[c].end(), [&](std::uint32_t n) {
                EntityId nid = eng.entity(n);
                return live_.state(nid).value() == 0 || presumed_.contains(nid);
            });
            if (all && live_.state(id).value() > 0) {
                presumed_.insert(id);
                grew = true;
            }
        }
    }
}

ListSnapshot SelfUpdatingList::recompute(std::optional<FailureEvent> event) {
    ListSnapshot s;
    s.time_ms = time_ms_;
    s.event = event;
    s.result.k = k_;
    s.result.metric = options_.metric;
    s.result.solver = solver_;
    std::vector<EntityId> red;
    try {
        s.result = k_contingency(live_, k_, solver_, options_);
        if (k_ == 1) {
            for (const auto& set : s.result.best_sets) red.push_back(set.front());
        } else {
            for (const auto& set : k_contingency(live_, 1, solver_, options_).best_sets) red.push_back(set.front());
        }
    } catch (const ContingencyError&) {
        // Too few eligible entities left; the list keeps only its augmentation.
    }

    if (!cache_->engine) cache_->engine = std::make_unique<Engine>(live_, options_.model);
    const Engine& eng = *cache_->engine;
    if (!cache_->topo) cache_->topo = std::make_unique<detail::Topology>(live_, eng);

    std::vector<char> marked(eng.size(), 0);
    for (std::uint32_t i = 0; i < eng.size(); ++i) marked[i] = live_.state(eng.entity(i)).value() == 0;
    for (const auto& r : red) marked[eng.index(r)] = 1;
    std::vector<char> c_marked = marked;
    for (const auto& q : presumed_) c_marked[eng.index(q)] = 1;

    std::set<EntityId> extra(presumed_.begin(), presumed_.end());
    for (auto c : detail::covered_comm_vertices(*cache_->topo, marked, c_marked)) extra.insert(eng.entity(c));

    s.contingent = red;
    for (const auto& e : extra) {
        if (event_failed_.contains(e) || live_.hardened().contains(e)) continue;
        if (std::find(red.begin(), red.end(), e) == red.end()) s.contingent.push_back(e);
    }
    return s;
}

std::vector<ListSnapshot> self_updating_list(const Network& network, const std::vector<FailureEvent>& events, int k,
                                             Solver solver, const SolverOptions& options,
                                             std::optional<long> horizon_ms, double budget_ms) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!network.contains(events[i].entity)) {
            throw NetworkError("event references unknown entity " + events[i].entity.token());
        }
        if (i > 0 && events[i].time_ms < events[i - 1].time_ms) throw NetworkError("events are not ordered by time");
    }
    long horizon = horizon_ms.value_or(events.empty() ? 0 : events.back().time_ms);
    SelfUpdatingList list(network, k, solver, options, budget_ms);
    std::vector<ListSnapshot> out;
    std::size_t next = 0;
    for (long t = 0; t <= horizon || next < events.size(); ++t) {
        ListSnapshot last;
        bool have_tick = false;
        if (t > 0) {
            last = list.tick();
            have_tick = true;
        }
        bool any_event = false;
        while (next < events.size() && events[next].time_ms <= t) {
            out.push_back(list.apply(events[next++]));
            any_event = true;
        }
        if (!any_event) out.push_back(have_tick ? last : list.snapshot());
    }
    return out;
}

nlohmann::json to_json(const ListSnapshot& snapshot) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : snapshot.contingent) list.push_back(e.token());
    nlohmann::json out = {{"time_ms", snapshot.time_ms},
                          {"contingent", list},
                          {"result", to_json(snapshot.result)},
                          {"elapsed_ms", snapshot.elapsed_ms},
                          {"over_budget", snapshot.over_budget}};
    if (snapshot.event) {
        out["event"] = {{"time_ms", snapshot.event->time_ms},
                        {"entity", snapshot.event->entity.token()},
                        {"new_state", snapshot.event->new_state.value()}};
    }
    return out;
}

}  // namespace gridcon
