#include "gridcon/idr.hpp"

#include <algorithm>
#include <cctype>

namespace gridcon {

IdrExpression IdrExpression::leaf(EntityId id) {
    IdrExpression e;
    e.op_ = Op::Leaf;
    e.entity_ = id;
    return e;
}

IdrExpression IdrExpression::make(Op op, std::vector<IdrExpression> children) {
    if (op == Op::Leaf) throw std::invalid_argument("use IdrExpression::leaf for leaves");
    if (children.size() < 2) throw std::invalid_argument("operator nodes need at least two operands");
    IdrExpression e;
    e.op_ = op;
    e.children_ = std::move(children);
    return e;
}

IdrExpression IdrExpression::min_and(std::vector<IdrExpression> c) { return make(Op::MinAnd, std::move(c)); }
IdrExpression IdrExpression::max_or(std::vector<IdrExpression> c) { return make(Op::MaxOr, std::move(c)); }
IdrExpression IdrExpression::new_xor(std::vector<IdrExpression> c) { return make(Op::NewXor, std::move(c)); }

namespace {

void collect_leaves(const IdrExpression& e, std::vector<EntityId>& out) {
    if (e.is_leaf()) {
        if (std::find(out.begin(), out.end(), e.entity()) == out.end()) out.push_back(e.entity());
        return;
    }
    for (const auto& c : e.children()) collect_leaves(c, out);
}

}  // namespace

std::vector<EntityId> IdrExpression::leaves() const {
    std::vector<EntityId> out;
    collect_leaves(*this, out);
    return out;
}

std::size_t IdrExpression::operator_count() const {
    if (is_leaf()) return 0;
    std::size_t n = 1;
    for (const auto& c : children_) n += c.operator_count();
    return n;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    Parser(std::string_view text, const std::set<EntityId>* known, int line)
        : text_(text), known_(known), line_(line) {
        auto comment = text_.find('%');
        if (comment != std::string_view::npos) text_ = text_.substr(0, comment);
    }

    Idr parse() {
        EntityId target = entity();
        skip_space();
        if (text_.substr(pos_, 2) != "<-") fail("expected '<-'");
        pos_ += 2;
        IdrExpression expr = xor_expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        for (const auto& leaf : expr.leaves()) {
            if (leaf == target) {
                throw IdrParseError("entity " + target.token() + " depends on itself", line_, 1);
            }
        }
        return Idr{target, std::move(expr)};
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw IdrParseError(message, line_, static_cast<int>(pos_) + 1);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    EntityId entity() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (start == pos_) {
            pos_ = start;
            fail(pos_ < text_.size() ? "expected entity, found '" + std::string(1, text_[pos_]) + "'"
                                     : "expected entity, found end of line");
        }
        std::string_view token = text_.substr(start, pos_ - start);
        EntityId id;
        try {
            id = EntityId::parse(token);
        } catch (const std::invalid_argument& e) {
            throw IdrParseError(e.what(), line_, static_cast<int>(start) + 1);
        }
        if (known_ != nullptr && !known_->contains(id)) {
            throw IdrParseError("unknown entity '" + std::string(token) + "'", line_, static_cast<int>(start) + 1);
        }
        return id;
    }

    IdrExpression xor_expr() { return chain('#', IdrExpression::Op::NewXor, &Parser::or_expr); }
    IdrExpression or_expr() { return chain('|', IdrExpression::Op::MaxOr, &Parser::and_expr); }
    IdrExpression and_expr() { return chain('&', IdrExpression::Op::MinAnd, &Parser::atom); }

    IdrExpression chain(char symbol, IdrExpression::Op op, IdrExpression (Parser::*next)()) {
        std::vector<IdrExpression> operands;
        operands.push_back((this->*next)());
        while (accept(symbol)) operands.push_back((this->*next)());
        if (operands.size() == 1) return std::move(operands.front());
        return IdrExpression::make(op, std::move(operands));
    }

    IdrExpression atom() {
        if (accept('(')) {
            IdrExpression inner = xor_expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        return IdrExpression::leaf(entity());
    }

    std::string_view text_;
    const std::set<EntityId>* known_;
    int line_;
    std::size_t pos_ = 0;
};

int precedence(IdrExpression::Op op) {
    switch (op) {
    case IdrExpression::Op::NewXor: return 1;
    case IdrExpression::Op::MaxOr: return 2;
    case IdrExpression::Op::MinAnd: return 3;
    case IdrExpression::Op::Leaf: return 4;
    }
    return 0;
}

const char* symbol(IdrExpression::Op op) {
    switch (op) {
    case IdrExpression::Op::NewXor: return " # ";
    case IdrExpression::Op::MaxOr: return " | ";
    case IdrExpression::Op::MinAnd: return " & ";
    default: return "";
    }
}

void print(const IdrExpression& e, std::string& out) {
    if (e.is_leaf()) {
        out += e.entity().token();
        return;
    }
    bool first = true;
    for (const auto& c : e.children()) {
        if (!first) out += symbol(e.op());
        first = false;
        // Same-precedence children keep their parentheses so nesting survives a reparse.
        bool parens = !c.is_leaf() && precedence(c.op()) <= precedence(e.op());
        if (parens) out += '(';
        print(c, out);
        if (parens) out += ')';
    }
}

}  // namespace

Idr parse_idr(std::string_view text, const std::set<EntityId>* known, int line_number) {
    return Parser(text, known, line_number).parse();
}

std::vector<Idr> parse_idr_document(std::string_view text, const std::set<EntityId>* known) {
    std::vector<Idr> out;
    int line_number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
        ++line_number;
        std::string_view content = line.substr(0, line.find('%'));
        bool blank = std::all_of(content.begin(), content.end(),
                                 [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
        if (!blank) out.push_back(parse_idr(line, known, line_number));
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return out;
}

std::string to_string(const IdrExpression& expr) {
    std::string out;
    print(expr, out);
    return out;
}

std::string to_string(const Idr& idr) { return idr.target.token() + " <- " + to_string(idr.expr); }

// ---------------------------------------------------------------------------
// Evaluation

std::uint8_t apply_operator(IdrExpression::Op op, const std::uint8_t* values, std::size_t count, Model model) {
    if (op == IdrExpression::Op::NewXor && model == Model::Iim) op = IdrExpression::Op::MinAnd;
    switch (op) {
    case IdrExpression::Op::MinAnd: return *std::min_element(values, values + count);
    case IdrExpression::Op::MaxOr: return *std::max_element(values, values + count);
    case IdrExpression::Op::NewXor: {
        bool all_equal = std::all_of(values, values + count, [&](std::uint8_t v) { return v == values[0]; });
        return all_equal ? values[0] : OperationalState::kReduced;
    }
    case IdrExpression::Op::Leaf: break;
    }
    return values[0];
}

namespace {

std::uint8_t eval_raw(const IdrExpression& e, const StateTable& states, Model model) {
    if (e.is_leaf()) {
        auto it = states.find(e.entity());
        if (it == states.end()) throw EvalError("no state for entity " + e.entity().token());
        std::uint8_t v = it->second.value();
        if (model == Model::Iim && v == OperationalState::kReduced) {
            throw EvalError("IIM evaluation saw reduced state on " + e.entity().token());
        }
        return v;
    }
    std::vector<std::uint8_t> values;
    values.reserve(e.children().size());
    for (const auto& c : e.children()) values.push_back(eval_raw(c, states, model));
    return apply_operator(e.op(), values.data(), values.size(), model);
}

}  // namespace

OperationalState eval_expr(const IdrExpression& expr, const StateTable& states, Model model) {
    return OperationalState::from_int(eval_raw(expr, states, model));
}

}  // namespace gridcon
