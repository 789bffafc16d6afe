#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gridcon/engine.hpp"
#include "gridcon/network.hpp"

namespace gridcon {

enum class DamageMetric { StateLoss, FailedCount };

std::string to_string(DamageMetric metric);
/// Accepts `state-loss` and `failed-count`; throws std::invalid_argument.
DamageMetric parse_metric(std::string_view text);
std::string to_string(Model model);
Model parse_model(std::string_view text);
std::string to_string(HardeningMode mode);
HardeningMode parse_hardening_mode(std::string_view text);

struct CascadeStep {
    std::size_t t = 0;
    StateTable states;
    std::set<EntityId> changed;
};

/// Snapshots from the moment of attack to steady state. `before` holds the
/// states just ahead of the attack; steps[0] is t=0 with the failures applied.
struct CascadeTrace {
    StateTable before;
    std::vector<CascadeStep> steps;
    std::set<EntityId> initial_failures;
    std::set<EntityId> hardened;

    [[nodiscard]] const StateTable& final_states() const { return steps.back().states; }
};

struct CascadeOptions {
    Model model = Model::Miim;
    HardeningMode mode = HardeningMode::Clamp;
};

/// One synchronous update of every IDR-bearing entity against `current`.
/// Hardened entities are taken from the network.
std::pair<StateTable, std::set<EntityId>> cascade_step(const Network& network, const StateTable& current,
                                                       const CascadeOptions& options = {});

/// Fails `initial_failures` at t=0, then steps until no change. The network's
/// own hardened set is merged with `hardened`. Throws NetworkError when a
/// failure targets a hardened or unknown entity.
CascadeTrace run_cascade(const Network& network, const std::set<EntityId>& initial_failures,
                         const std::set<EntityId>& hardened = {}, const CascadeOptions& options = {});

/// Metric over node entities of the final snapshot relative to `before`.
long damage(const CascadeTrace& trace, DamageMetric metric);

/// Network with its state table replaced by the steady state reached from
/// its current states.
Network settled(const Network& network, const CascadeOptions& options = {});

nlohmann::json trace_to_json(const CascadeTrace& trace);
/// `t,entity,state` rows with a header line.
std::string trace_to_csv(const CascadeTrace& trace);

}  // namespace gridcon
