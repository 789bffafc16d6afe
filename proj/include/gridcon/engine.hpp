#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridcon/network.hpp"

namespace gridcon {

/// How a protected entity is shielded from the cascade.
enum class HardeningMode { Clamp, Isolate };

/// Per-entity protection masks in engine index space. Clamped entities keep
/// their state. Isolated entities still evolve, but dependents read `frozen`.
struct Protection {
    std::vector<char> clamped;
    std::vector<char> isolated;
    std::vector<std::uint8_t> frozen;
};

/// Scratch buffers for one thread of evaluation.
struct Workspace {
    std::vector<std::uint8_t> stack;
    std::vector<std::pair<std::uint32_t, std::uint8_t>> pending;
    std::vector<std::uint32_t> todo;
    std::vector<std::uint32_t> changed;
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;
};

/// Network compiled into flat arrays for repeated cascade runs.
/// Entities are indexed in canonical order.
class Engine {
public:
    Engine(const Network& network, Model model);

    [[nodiscard]] std::size_t size() const { return entities_.size(); }
    [[nodiscard]] Model model() const { return model_; }
    [[nodiscard]] const std::vector<EntityId>& entities() const { return entities_; }
    [[nodiscard]] EntityId entity(std::size_t i) const { return entities_[i]; }
    [[nodiscard]] std::optional<std::uint32_t> find(EntityId id) const;
    /// Throws NetworkError for unknown entities.
    [[nodiscard]] std::uint32_t index(EntityId id) const;
    [[nodiscard]] bool is_node(std::size_t i) const { return node_[i] != 0; }
    [[nodiscard]] bool has_rule(std::size_t i) const;
    [[nodiscard]] const std::vector<std::uint32_t>& dependents(std::size_t i) const { return dependents_[i]; }

    /// Network state table in index space.
    [[nodiscard]] const std::vector<std::uint8_t>& initial_states() const { return initial_; }

    /// Protection from the network's hardened set in the given mode.
    [[nodiscard]] Protection protection(const std::set<EntityId>& hardened, HardeningMode mode,
                                        const std::vector<std::uint8_t>& states) const;
    [[nodiscard]] Protection no_protection() const;

    /// Value the IDR (or link rule) of entity i yields against `cur`.
    [[nodiscard]] std::uint8_t evaluate(std::uint32_t i, const std::vector<std::uint8_t>& cur, const Protection& p,
                                        Workspace& ws) const;

    /// One synchronous step. When `full` is false only dependents of
    /// `ws.changed` are re-evaluated. Leaves the new changes in `ws.changed`
    /// (sorted); returns false when nothing changed.
    bool step(std::vector<std::uint8_t>& cur, const Protection& p, Workspace& ws, bool full) const;

    /// Steps until a fixpoint. `seed` lists entities that changed just before
    /// the call; pass std::nullopt to evaluate everything on the first step.
    /// Returns the number of steps that changed something.
    std::size_t settle(std::vector<std::uint8_t>& cur, const Protection& p, Workspace& ws,
                       const std::optional<std::vector<std::uint32_t>>& seed) const;

    /// Damage of `after` relative to `before`, over node entities.
    [[nodiscard]] long damage(const std::vector<std::uint8_t>& before, const std::vector<std::uint8_t>& after,
                              bool failed_count) const;

private:
    struct Node {
        IdrExpression::Op op;
        std::uint32_t arg;  // entity index for leaves, child count otherwise
    };

    void compile(const IdrExpression& e, std::vector<Node>& out) const;
    [[nodiscard]] std::uint8_t read(std::uint32_t j, const std::vector<std::uint8_t>& cur, const Protection& p) const {
        return p.isolated.empty() || !p.isolated[j] ? cur[j] : p.frozen[j];
    }

    Model model_;
    std::vector<EntityId> entities_;
    std::vector<char> node_;
    std::vector<std::uint8_t> initial_;
    std::vector<std::uint32_t> rule_begin_;  // size()+1 offsets into nodes_
    std::vector<Node> nodes_;
    std::vector<std::pair<std::int64_t, std::int64_t>> link_;  // -1 when not a link
    std::vector<std::vector<std::uint32_t>> dependents_;
};

}  // namespace gridcon
