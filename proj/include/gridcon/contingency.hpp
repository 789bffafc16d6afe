#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridcon/cascade.hpp"

namespace gridcon {

enum class Solver { Exact, Heuristic };

std::string to_string(Solver solver);
Solver parse_solver(std::string_view text);

class ContingencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using EntitySet = std::vector<EntityId>;

struct ContingencyResult {
    int k = 0;
    /// Tie group in canonical order; each set is sorted.
    std::vector<EntitySet> best_sets;
    long damage_value = 0;
    DamageMetric metric = DamageMetric::StateLoss;
    Solver solver = Solver::Exact;
    double elapsed_ms = 0.0;
};

struct SolverOptions {
    DamageMetric metric = DamageMetric::StateLoss;
    Model model = Model::Miim;
    HardeningMode mode = HardeningMode::Clamp;
    /// Extra entities excluded from the candidate pool (besides hardened ones).
    std::set<EntityId> excluded;
    /// Worker count for the exact solver; 0 reads GRIDCON_THREADS, then
    /// falls back to the hardware concurrency.
    unsigned threads = 0;
};

/// Node entities that are operational at the settled baseline and neither
/// hardened nor excluded, in canonical order.
std::vector<EntityId> eligible_entities(const Network& network, const SolverOptions& options = {});

/// Exhaustive search over every k-subset of eligible entities. Damage is
/// measured from the network's settled baseline.
ContingencyResult exact_k_contingency(const Network& network, int k, const SolverOptions& options = {});

/// Damage of failing `set` on top of the settled baseline.
long evaluate_set(const Network& network, const EntitySet& set, const SolverOptions& options = {});

enum class Color { White, Yellow, Blue, Green, Pink, Red, Grey };

std::string to_string(Color color);

struct ColoringState {
    std::map<EntityId, Color> color;

    [[nodiscard]] Color of(EntityId id) const;
    [[nodiscard]] std::vector<EntityId> with(Color c) const;
};

/// Yellow for generator buses, Blue for PMU buses, Green for both, White otherwise.
ColoringState color_base(const Network& network);

/// Diagnostics of one heuristic run.
struct HeuristicTrace {
    std::vector<EntityId> pink;
    std::vector<EntityId> red;
    std::vector<EntityId> grey;
    ColoringState final_colors;
};

ContingencyResult heuristic_k_contingency(const Network& network, int k, const SolverOptions& options = {},
                                          HeuristicTrace* trace = nullptr);

ContingencyResult k_contingency(const Network& network, int k, Solver solver, const SolverOptions& options = {});

nlohmann::json to_json(const ContingencyResult& result);

}  // namespace gridcon
