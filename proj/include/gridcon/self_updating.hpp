#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "gridcon/contingency.hpp"

namespace gridcon {

struct FailureEvent {
    long time_ms = 0;
    EntityId entity;
    OperationalState new_state = OperationalState::failed();
};

/// Parses `time_ms,entity,new_state` lines. Blank lines, `#` comments and a
/// leading header row are skipped. Throws std::invalid_argument with the
/// line number on malformed rows or out-of-order times.
std::vector<FailureEvent> parse_events(std::string_view csv);

/// Contingency list as of one millisecond, after an event or a clock tick.
struct ListSnapshot {
    long time_ms = 0;
    std::optional<FailureEvent> event;
    ContingencyResult result;
    /// K=1 list with its augmentation; red entities first, then canonical order.
    std::vector<EntityId> contingent;
    double elapsed_ms = 0.0;
    bool over_budget = false;
};

/// Live contingency tracking. Every tick advances the running cascade by one
/// step (1 ms) and recomputes the list; events change states directly.
///
/// The K=1 list is extended by communication vertices whose E_PC edges all
/// reach failed or red buses, or whose E_CC edges all reach failed or red
/// communication vertices. Vertices that have lost every E_CC path to a
/// control center join the list one hop per tick, spreading out from failed
/// vertices.
class SelfUpdatingList {
public:
    SelfUpdatingList(Network network, int k, Solver solver, SolverOptions options, double budget_ms = 33.0);
    ~SelfUpdatingList();

    /// Throws NetworkError for unknown entities; an IIM list rejects state 1.
    ListSnapshot apply(const FailureEvent& event);
    ListSnapshot tick();
    /// Recomputes without changing anything.
    ListSnapshot snapshot();

    [[nodiscard]] long time_ms() const { return time_ms_; }
    [[nodiscard]] const Network& network() const { return live_; }

private:
    ListSnapshot recompute(std::optional<FailureEvent> event);
    void advance_presumed_cut_off(const std::vector<char>& prev_dead);

    Network live_;
    int k_;
    Solver solver_;
    SolverOptions options_;
    double budget_ms_;
    long time_ms_ = 0;
    std::set<EntityId> event_failed_;
    std::set<EntityId> presumed_;

    struct Cache;
    std::unique_ptr<Cache> cache_;
};

/// Replays `events` over [0, horizon_ms] (horizon defaults to the last
/// event time). Emits one snapshot per event and one per tick without events.
std::vector<ListSnapshot> self_updating_list(const Network& network, const std::vector<FailureEvent>& events, int k,
                                             Solver solver, const SolverOptions& options = {},
                                             std::optional<long> horizon_ms = std::nullopt, double budget_ms = 33.0);

nlohmann::json to_json(const ListSnapshot& snapshot);

}  // namespace gridcon
