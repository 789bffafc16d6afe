#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridcon/contingency.hpp"

namespace gridcon {

class GameError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PayoffEntry {
    std::string target;
    long defender_hardened = 0;
    long defender_not_hardened = 0;
    long attacker_hardened = 0;
    long attacker_not_hardened = 0;

    friend bool operator==(const PayoffEntry&, const PayoffEntry&) = default;
};

/// Per-target utilities. Hardening must never be worse for the defender nor
/// better for the attacker.
struct PayoffTable {
    std::vector<PayoffEntry> entries;

    /// Throws GameError naming the first target that breaks dominance.
    void validate() const;
    /// Array of {target, ud_h, ud_n, ua_h, ua_n}; validates.
    static PayoffTable from_json(const nlohmann::json& doc);
    [[nodiscard]] nlohmann::json to_json() const;
};

struct GameScenario {
    int game_type = 1;
    int k = 1;
    int m = 0;  // attacker budget, type 1
    int l = 0;  // random failures, type 3
    std::vector<EntityId> region;
    std::vector<int> region_substations;
    std::uint64_t seed = 0;
    Solver solver = Solver::Heuristic;
    DamageMetric metric = DamageMetric::StateLoss;
    Model model = Model::Miim;
    HardeningMode mode = HardeningMode::Clamp;
    /// Budget of the arrest loop after the attack; defaults to k.
    std::optional<int> arrest_budget;

    static GameScenario from_json(const nlohmann::json& doc);
    [[nodiscard]] nlohmann::json to_json() const;
};

struct GameOutcome {
    int game_type = 0;
    /// Committed before the attack (types 1 and 2).
    std::vector<EntityId> pre_hardened;
    /// Added by the arrest loop after the attack.
    std::vector<EntityId> adaptive_hardened;
    std::set<EntityId> hardened;
    std::vector<EntityId> attacked;
    /// Type 2 only: entities that drop when the whole region fails.
    std::vector<EntityId> predicted_vulnerable;
    std::vector<std::pair<EntityId, long>> impact_ranking;
    CascadeTrace trace;
    long damage_hardened = 0;
    long damage_unhardened = 0;
    long operational_before = 0;
    long operational_after_hardened = 0;
    long operational_after_unhardened = 0;
    PayoffEntry payoff;
};

/// Other node entities whose settled state drops when only `entity` fails.
/// Throws NetworkError if the entity is unknown, failed or hardened.
long impact_factor(const Network& network, EntityId entity, const CascadeOptions& options = {});

struct ArrestResult {
    std::vector<EntityId> hardened;
    /// Impact factor of each hardened entity when it was picked.
    std::vector<long> impact;
    CascadeTrace trace;
    std::size_t iterations = 0;
};

/// Hardens, one entity per iteration, the highest-IF member of the current
/// contingency list while the predicted cascade still lowers some state.
ArrestResult adaptive_harden(const Network& network, const std::set<EntityId>& active_failures, int budget,
                             Solver solver = Solver::Heuristic, const SolverOptions& options = {});

/// Attacker's choice of `budget` failures among unhardened eligible entities.
std::vector<EntityId> best_response_attack(const Network& network, const std::set<EntityId>& hardened, int budget,
                                           const SolverOptions& options = {}, Solver solver = Solver::Exact);

/// Throws GameError when the scenario breaks its invariants.
GameOutcome run_game(const Network& network, const GameScenario& scenario);

nlohmann::json to_json(const GameOutcome& outcome);

}  // namespace gridcon
