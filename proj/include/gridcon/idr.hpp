#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridcon/entity.hpp"

namespace gridcon {

/// Operational level of an entity: 0 failed, 1 reduced, 2 full.
class OperationalState {
public:
    static constexpr std::uint8_t kFailed = 0;
    static constexpr std::uint8_t kReduced = 1;
    static constexpr std::uint8_t kFull = 2;

    constexpr OperationalState() = default;

    /// Throws std::out_of_range for values outside {0, 1, 2}.
    static OperationalState from_int(long value) {
        if (value < 0 || value > 2) {
            throw std::out_of_range("operational state must be 0, 1 or 2, got " + std::to_string(value));
        }
        return OperationalState(static_cast<std::uint8_t>(value));
    }

    static constexpr OperationalState failed() { return OperationalState(kFailed); }
    static constexpr OperationalState reduced() { return OperationalState(kReduced); }
    static constexpr OperationalState full() { return OperationalState(kFull); }

    [[nodiscard]] constexpr std::uint8_t value() const { return value_; }

    friend constexpr auto operator<=>(OperationalState, OperationalState) = default;

private:
    constexpr explicit OperationalState(std::uint8_t v) : value_(v) {}
    std::uint8_t value_ = kFull;
};

using StateTable = std::map<EntityId, OperationalState>;

/// Dependency semantics. MIIM is three-valued with min-AND, max-OR and
/// new-XOR; IIM is the binary predecessor where new-XOR degrades to AND.
enum class Model { Miim, Iim };

/// Operator tree of an interdependency relation.
class IdrExpression {
public:
    enum class Op : std::uint8_t { Leaf, MinAnd, MaxOr, NewXor };

    static IdrExpression leaf(EntityId id);
    /// Interior constructors require at least two children.
    static IdrExpression min_and(std::vector<IdrExpression> children);
    static IdrExpression max_or(std::vector<IdrExpression> children);
    static IdrExpression new_xor(std::vector<IdrExpression> children);
    static IdrExpression make(Op op, std::vector<IdrExpression> children);

    [[nodiscard]] Op op() const { return op_; }
    [[nodiscard]] bool is_leaf() const { return op_ == Op::Leaf; }
    [[nodiscard]] const EntityId& entity() const { return entity_; }
    [[nodiscard]] const std::vector<IdrExpression>& children() const { return children_; }

    /// Leaf entities in first-occurrence order, without duplicates.
    [[nodiscard]] std::vector<EntityId> leaves() const;
    [[nodiscard]] std::size_t operator_count() const;

    friend bool operator==(const IdrExpression&, const IdrExpression&) = default;

private:
    Op op_ = Op::Leaf;
    EntityId entity_{};
    std::vector<IdrExpression> children_;
};

struct Idr {
    EntityId target;
    IdrExpression expr;

    friend bool operator==(const Idr&, const Idr&) = default;
};

/// Syntax or reference error in IDR text. Line and column are 1-based.
class IdrParseError : public std::runtime_error {
public:
    IdrParseError(const std::string& message, int line, int column)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + message),
          line_(line),
          column_(column) {}

    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    int line_;
    int column_;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses one IDR line: `target <- expr`, with `&` min-AND, `|` max-OR and
/// `#` new-XOR (binding tightest to loosest). Text after `%` is a comment.
/// When `known` is non-null every token must be a member of it.
Idr parse_idr(std::string_view text, const std::set<EntityId>* known = nullptr, int line_number = 1);

/// Parses a multi-line document; blank and comment-only lines are skipped.
std::vector<Idr> parse_idr_document(std::string_view text, const std::set<EntityId>* known = nullptr);

/// Prints with the minimal parentheses needed to reparse to the same tree.
std::string to_string(const IdrExpression& expr);
std::string to_string(const Idr& idr);

/// Evaluates an expression against a state table.
/// Throws EvalError when a leaf has no state, or when IIM sees a reduced state.
OperationalState eval_expr(const IdrExpression& expr, const StateTable& states, Model model);

/// Pure operator semantics over raw levels, shared by every evaluator.
std::uint8_t apply_operator(IdrExpression::Op op, const std::uint8_t* values, std::size_t count, Model model);

}  // namespace gridcon
