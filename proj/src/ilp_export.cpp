#include "gridcon/ilp_export.hpp"

#include <sstream>

namespace gridcon {

namespace {

std::string x(EntityId id, std::size_t t) { return "x_" + id.token() + "_" + std::to_string(t); }
std::string f(EntityId id) { return "f_" + id.token(); }

char aux_prefix(IdrExpression::Op op) {
    switch (op) {
    case IdrExpression::Op::MinAnd: return 'z';
    case IdrExpression::Op::MaxOr: return 'h';
    default: return 'g';
    }
}

class Writer {
public:
    Writer(const Network& net, int k, IlpStats& stats) : net_(net), k_(k), stats_(stats) {
        stats_.horizon = net.entities().empty() ? 0 : net.entities().size() - 1;
    }

    std::string build() {
        const std::size_t T = stats_.horizon;
        for (const auto& id : net_.entities()) {
            for (std::size_t t = 0; t <= T; ++t) general_.push_back(x(id, t));
        }
        stats_.x_vars = general_.size();

        initial_conditions();
        for (std::size_t t = 1; t <= T; ++t) {
            for (const auto& id : net_.entities()) step(id, t);
        }

        std::ostringstream out;
        header(out);
        out << "Minimize\n obj:";
        std::vector<std::string> terms;
        for (const auto& id : net_.entities()) terms.push_back(x(id, T));
        if (terms.empty()) terms.push_back("0 x_none");
        write_sum(out, terms);
        out << "\nSubject To\n";
        for (const auto& row : rows_) out << ' ' << row << '\n';
        out << "Bounds\n";
        for (const auto& v : general_) out << " 0 <= " << v << " <= 2\n";
        for (const auto& v : continuous_) out << " 0 <= " << v << " <= 2\n";
        if (net_.entities().empty()) out << " x_none = 0\n";
        out << "General\n";
        for (const auto& v : general_) out << ' ' << v << '\n';
        if (!binary_.empty()) {
            out << "Binary\n";
            for (const auto& v : binary_) out << ' ' << v << '\n';
        }
        out << "End\n";
        stats_.constraints = rows_.size();
        return out.str();
    }

private:
    void header(std::ostream& out) const {
        out << "\\ K-contingency model, K = " << k_ << ", horizon T = " << stats_.horizon << "\n"
            << "\\ Objective: minimize the sum of entity states at the last step T.\n"
            << "\\ init_*: x_i_0 + s_i f_i = s_i, sum_f: sum of f_i = K. Written literally as\n"
            << "\\   sum of x_i_0 = K the failure count would be lost over states {0,1,2},\n"
            << "\\   so binary fail indicators f_i carry it instead.\n"
            << "\\ mono_*: x_i_t <= x_i_(t-1), a failed entity never recovers within a cascade.\n"
            << "\\ idr_*: x_i_t <= value of the IDR root evaluated on step t-1 states.\n"
            << "\\ z (min-AND): z <= each operand. h (max-OR): h >= each operand.\n"
            << "\\ g (new-XOR): N g <= sum of operands with 0 <= g <= 2. This does not encode\n"
            << "\\   the full truth table (g = 1 stays feasible when every operand is 2).\n"
            << "\\ These rows bound states from above only, so the model relaxes the cascade;\n"
            << "\\   exact optima come from exhaustive search.\n"
            << "\\ link_*: a line or channel stays up while either endpoint is up.\n"
            << "\\ root_*: entities without a rule keep their state.\n";
    }

    void write_sum(std::ostream& out, const std::vector<std::string>& terms) const {
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (i > 0 && i % 8 == 0) out << "\n   ";
            out << (i == 0 ? " " : " + ") << terms[i];
        }
    }

    std::string row(const std::string& name, const std::string& body) {
        return name + "_" + std::to_string(rows_.size()) + ": " + body;
    }

    void add(const std::string& name, const std::string& body) { rows_.push_back(row(name, body)); }

    void initial_conditions() {
        std::vector<std::string> fails;
        for (const auto& id : net_.entities()) {
            int s = net_.state(id).value();
            bool eligible = id.is_node() && s > 0 && !net_.hardened().contains(id);
            if (eligible) {
                binary_.push_back(f(id));
                fails.push_back(f(id));
                add("init", x(id, 0) + " + " + std::to_string(s) + " " + f(id) + " = " + std::to_string(s));
            } else {
                add("init", x(id, 0) + " = " + std::to_string(s));
            }
        }
        stats_.f_vars = fails.size();
        std::ostringstream sum;
        if (fails.empty()) {
            sum << "0 x_none";
        } else {
            for (std::size_t i = 0; i < fails.size(); ++i) sum << (i ? " + " : "") << fails[i];
        }
        add("sum_f", sum.str() + " = " + std::to_string(k_));
    }

    // Returns the variable holding the node value at step t.
    std::string node(const IdrExpression& e, EntityId owner, std::size_t t, std::size_t& counter) {
        if (e.is_leaf()) return x(e.entity(), t - 1);
        std::vector<std::string> operands;
        for (const auto& c : e.children()) operands.push_back(node(c, owner, t, counter));
        char p = aux_prefix(e.op());
        std::string v = std::string(1, p) + "_" + owner.token() + "_" + std::to_string(counter++) + "_" + std::to_string(t);
        continuous_.push_back(v);
        switch (p) {
        case 'z':
            ++stats_.z_vars;
            for (const auto& o : operands) add("z", v + " - " + o + " <= 0");
            break;
        case 'h':
            ++stats_.h_vars;
            for (const auto& o : operands) add("h", v + " - " + o + " >= 0");
            break;
        default: {
            ++stats_.g_vars;
            std::string body = std::to_string(operands.size()) + " " + v;
            for (const auto& o : operands) body += " - " + o;
            add("g", body + " <= 0");
        }
        }
        return v;
    }

    void step(EntityId id, std::size_t t) {
        add("mono", x(id, t) + " - " + x(id, t - 1) + " <= 0");
        if (net_.hardened().contains(id)) {
            add("root", x(id, t) + " - " + x(id, t - 1) + " = 0");
            return;
        }
        if (auto it = net_.idrs().find(id); it != net_.idrs().end()) {
            std::size_t counter = 0;
            std::string root = node(it->second.expr, id, t, counter);
            add("idr", x(id, t) + " - " + root + " <= 0");
            return;
        }
        if (auto it = net_.links().find(id); it != net_.links().end()) {
            add("link", x(id, t) + " - " + x(it->second.first, t - 1) + " - " + x(it->second.second, t - 1) + " <= 0");
            return;
        }
        add("root", x(id, t) + " - " + x(id, t - 1) + " = 0");
    }

    const Network& net_;
    int k_;
    IlpStats& stats_;
    std::vector<std::string> rows_;
    std::vector<std::string> general_;
    std::vector<std::string> continuous_;
    std::vector<std::string> binary_;
};

}  // namespace

std::string export_ilp(const Network& network, int k, IlpStats* stats) {
    IlpStats local;
    IlpStats& s = stats ? *stats : local;
    s = IlpStats{};
    return Writer(network, k, s).build();
}

}  // namespace gridcon
