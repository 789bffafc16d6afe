#pragma once

#include <vector>

#include "gridcon/contingency.hpp"
#include "gridcon/engine.hpp"

namespace gridcon::detail {

/// Settled baseline plus protection masks; scores candidate failure sets.
class SetEvaluator {
public:
    SetEvaluator(const Network& network, const SolverOptions& options);

    [[nodiscard]] const Engine& engine() const { return engine_; }
    [[nodiscard]] const std::vector<std::uint8_t>& baseline() const { return baseline_; }
    [[nodiscard]] const Protection& protection() const { return protection_; }
    [[nodiscard]] bool protected_entity(std::uint32_t i) const;

    /// Node entities operational at the baseline, unprotected and not excluded.
    [[nodiscard]] std::vector<std::uint32_t> eligible(const std::set<EntityId>& excluded) const;

    /// Fails `set` on the baseline and settles; result lands in `out`.
    void run(const std::vector<std::uint32_t>& set, Workspace& ws, std::vector<std::uint8_t>& out) const;
    [[nodiscard]] long damage(const std::vector<std::uint32_t>& set, Workspace& ws,
                              std::vector<std::uint8_t>& scratch) const;
    [[nodiscard]] long damage(const std::vector<std::uint32_t>& set) const;

private:
    Engine engine_;
    Protection protection_;
    std::vector<std::uint8_t> baseline_;
    bool failed_count_;
};

/// Vertex adjacency of the two-layer graph in engine index space.
struct Topology {
    Topology(const Network& network, const Engine& engine);

    std::vector<std::vector<std::uint32_t>> pp;  // bus -> buses
    std::vector<std::vector<std::uint32_t>> pc;  // vertex -> vertices of the other layer
    std::vector<std::vector<std::uint32_t>> cc;  // comm vertex -> comm vertices
    std::vector<std::uint32_t> buses;
    std::vector<std::uint32_t> comm;
};

/// Communication vertices all of whose E_PC edges reach `p_marked` buses, or
/// all of whose E_CC edges reach `c_marked` communication vertices.
std::vector<std::uint32_t> covered_comm_vertices(const Topology& topo, const std::vector<char>& p_marked,
                                                 const std::vector<char>& c_marked);

std::vector<EntitySet> to_sets(const Engine& engine, std::vector<std::vector<std::uint32_t>> sets);

unsigned worker_count(unsigned requested);

}  // namespace gridcon::detail
