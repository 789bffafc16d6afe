#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "gridcon/cascade.hpp"
#include "gridcon/contingency.hpp"
#include "gridcon/datasets.hpp"
#include "gridcon/game.hpp"
#include "gridcon/ilp_export.hpp"
#include "gridcon/network_io.hpp"
#include "gridcon/self_updating.hpp"

using nlohmann::json;
using namespace gridcon;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::string sha256(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

std::vector<EntityId> parse_tokens(const std::string& list) {
    std::vector<EntityId> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        if (tok.empty()) continue;
        try {
            out.push_back(EntityId::parse(tok));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

std::set<EntityId> token_set(const std::vector<std::string>& lists) {
    std::set<EntityId> out;
    for (const auto& l : lists) {
        for (auto e : parse_tokens(l)) out.insert(e);
    }
    return out;
}

void strip_timing(json& j) {
    if (j.is_object()) {
        j.erase("elapsed_ms");
        j.erase("timing_ms");
        for (auto& [key, v] : j.items()) strip_timing(v);
    } else if (j.is_array()) {
        for (auto& v : j) strip_timing(v);
    }
}

class Clock {
public:
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Options shared by the analysis subcommands.
struct Common {
    std::string network;
    std::string model = "miim";
    std::string mode = "clamp";
    std::string metric = "state-loss";
    std::string solver = "heuristic";
    std::string report;
    bool no_timing = false;
};

struct Run {
    json report;
    Clock clock;

    Run(const std::string& command, int argc, char** argv) {
        report["command"] = command;
        report["argv"] = std::vector<std::string>(argv + 1, argv + argc);
        report["inputs"] = json::object();
        report["timing_ms"] = json::object();
    }

    std::string input(const std::string& key, const std::string& path) {
        std::string text = read_file(path);
        report["inputs"][key] = {{"path", path}, {"sha256", sha256(text)}};
        return text;
    }

    Network load(const Common& c) {
        Network n = load_network_text(input("network", c.network));
        report["timing_ms"]["load"] = clock.lap();
        return n;
    }

    void describe(const Common& c, std::optional<std::uint64_t> seed = std::nullopt) {
        report["solver"] = c.solver;
        report["metric"] = c.metric;
        report["model"] = c.model;
        report["hardening_mode"] = c.mode;
        report["seed"] = seed ? json(*seed) : json(nullptr);
    }

    void emit(const Common& c) {
        report["timing_ms"]["run"] = clock.lap();
        if (c.no_timing) strip_timing(report);
        std::string text = report.dump(2) + "\n";
        if (c.report.empty()) {
            std::cout << text;
        } else {
            write_file(c.report, text);
        }
    }
};

SolverOptions solver_options(const Common& c) {
    SolverOptions o;
    o.metric = parse_metric(c.metric);
    o.model = parse_model(c.model);
    o.mode = parse_hardening_mode(c.mode);
    return o;
}

void add_common(CLI::App* sub, Common& c, bool needs_network = true, bool with_solver = false) {
    if (needs_network) sub->add_option("--network", c.network, "Network file")->required()->check(CLI::ExistingFile);
    sub->add_option("--model", c.model, "miim or iim")->check(CLI::IsMember({"miim", "iim"}));
    sub->add_option("--hardening-mode", c.mode, "clamp or isolate")->check(CLI::IsMember({"clamp", "isolate"}));
    sub->add_option("--metric", c.metric, "state-loss or failed-count")
        ->check(CLI::IsMember({"state-loss", "failed-count"}));
    if (with_solver) sub->add_option("--solver", c.solver, "exact or heuristic")->check(CLI::IsMember({"exact", "heuristic"}));
    sub->add_option("--report", c.report, "Write the report here instead of standard output");
    sub->add_flag("--no-timing", c.no_timing, "Omit wall-clock fields so reports compare byte for byte");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cascade, contingency and hardening analysis for interdependent power and communication networks"};
    app.require_subcommand(1);

    Common c;
    std::vector<std::string> fail, harden, exclude;
    std::string format = "json";
    int k = 1;
    unsigned threads = 0;
    std::string events_path, out_path, scenario_path, dataset_name;
    double budget_ms = 33.0;
    std::optional<long> horizon_ms;
    bool csv = false;

    auto* simulate = app.add_subcommand("simulate", "Run a cascade from initial failures");
    add_common(simulate, c);
    simulate->add_option("--fail", fail, "Comma-separated entities to fail at t=0")->required();
    simulate->add_option("--harden", harden, "Comma-separated entities to harden");
    simulate->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* contingency = app.add_subcommand("contingency", "Most damaging K-entity failure sets");
    add_common(contingency, c, true, true);
    contingency->add_option("-k", k, "Number of simultaneous failures")->required()->check(CLI::PositiveNumber);
    contingency->add_option("--exclude", exclude, "Comma-separated entities left out of the candidate pool");
    contingency->add_option("--threads", threads, "Exact solver workers (default GRIDCON_THREADS)");

    auto* events = app.add_subcommand("events", "Replay failure events and track the contingency list");
    add_common(events, c, true, true);
    events->add_option("--events", events_path, "CSV of time_ms,entity,new_state")->required()->check(CLI::ExistingFile);
    events->add_option("-k", k, "List size")->required()->check(CLI::PositiveNumber);
    events->add_option("--budget-ms", budget_ms, "Per-recompute latency budget")->check(CLI::PositiveNumber);
    events->add_option("--horizon-ms", horizon_ms, "Last simulated millisecond (default: last event)");

    auto* ilp = app.add_subcommand("export-ilp", "Write the K-contingency model in LP format");
    add_common(ilp, c);
    ilp->add_option("-k", k, "Number of simultaneous failures")->required()->check(CLI::PositiveNumber);
    ilp->add_option("--out", out_path, "LP file")->required();

    auto* game = app.add_subcommand("game", "Play hardening games");
    game->add_option("--network", c.network, "Network file")->required()->check(CLI::ExistingFile);
    game->add_option("--report", c.report, "Write the report here instead of standard output");
    game->add_flag("--no-timing", c.no_timing, "Omit wall-clock fields so reports compare byte for byte");
    game->add_option("--scenario", scenario_path, "Scenario JSON (object or array)")->required()->check(CLI::ExistingFile);
    game->add_flag("--csv", csv, "Emit before/hardened/unhardened operational counts as CSV");

    auto* dataset = app.add_subcommand("dataset", "Write a bundled network");
    dataset->add_option("--name", dataset_name, "ieee14 or ieee118")->required()->check(CLI::IsMember({"ieee14", "ieee118"}));
    dataset->add_option("--out", out_path, "Network file (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dataset->parsed()) {
            Network n = build_dataset(dataset_name);
            std::string text = dump_network(n);
            if (out_path.empty()) {
                std::cout << text;
            } else {
                write_file(out_path, text);
                json r = {{"command", "dataset"},
                          {"name", dataset_name},
                          {"out", out_path},
                          {"sha256", sha256(text)},
                          {"entities", n.entities().size()},
                          {"idrs", n.idrs().size()},
                          {"substations", n.annotations().substations.size()}};
                std::cout << r.dump(2) << "\n";
            }
            return 0;
        }

        if (simulate->parsed()) {
            Run run("simulate", argc, argv);
            Network n = run.load(c);
            CascadeOptions opts{parse_model(c.model), parse_hardening_mode(c.mode)};
            CascadeTrace trace = run_cascade(n, token_set(fail), token_set(harden), opts);
            if (format == "csv") {
                std::cout << trace_to_csv(trace);
                return 0;
            }
            run.describe(c);
            run.report["result"] = {{"trace", trace_to_json(trace)},
                                    {"damage", damage(trace, parse_metric(c.metric))},
                                    {"steps", trace.steps.size() - 1}};
            run.emit(c);
            return 0;
        }

        if (contingency->parsed()) {
            Run run("contingency", argc, argv);
            Network n = run.load(c);
            SolverOptions opts = solver_options(c);
            opts.excluded = token_set(exclude);
            opts.threads = threads;
            run.describe(c);
            run.report["result"] = to_json(k_contingency(n, k, parse_solver(c.solver), opts));
            run.emit(c);
            return 0;
        }

        if (events->parsed()) {
            Run run("events", argc, argv);
            Network n = run.load(c);
            std::vector<FailureEvent> evs;
            try {
                evs = parse_events(run.input("events", events_path));
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            auto snaps = self_updating_list(n, evs, k, parse_solver(c.solver), solver_options(c), horizon_ms, budget_ms);
            json list = json::array();
            long violations = 0;
            double worst = 0.0;
            for (const auto& s : snaps) {
                list.push_back(to_json(s));
                worst = std::max(worst, s.elapsed_ms);
                if (s.over_budget) {
                    ++violations;
                    std::cerr << "budget exceeded at t=" << s.time_ms << " ms: " << s.elapsed_ms << " ms > " << budget_ms
                              << " ms\n";
                }
            }
            run.describe(c);
            run.report["budget_ms"] = budget_ms;
            run.report["result"] = {{"snapshots", list},
                                    {"budget_violations", violations},
                                    {"max_elapsed_ms", worst}};
            run.emit(c);
            return 0;
        }

        if (ilp->parsed()) {
            Run run("export-ilp", argc, argv);
            Network n = run.load(c);
            IlpStats stats;
            write_file(out_path, export_ilp(n, k, &stats));
            run.describe(c);
            run.report["result"] = {{"out", out_path},
                                    {"horizon", stats.horizon},
                                    {"x_vars", stats.x_vars},
                                    {"z_vars", stats.z_vars},
                                    {"h_vars", stats.h_vars},
                                    {"g_vars", stats.g_vars},
                                    {"f_vars", stats.f_vars},
                                    {"constraints", stats.constraints}};
            run.emit(c);
            return 0;
        }

        if (game->parsed()) {
            Run run("game", argc, argv);
            Network n = run.load(c);
            json doc;
            try {
                doc = json::parse(run.input("scenario", scenario_path));
            } catch (const json::parse_error& e) {
                throw UsageError(std::string("scenario: ") + e.what());
            }
            std::vector<GameScenario> scenarios;
            if (doc.is_array()) {
                for (const auto& d : doc) scenarios.push_back(GameScenario::from_json(d));
            } else {
                scenarios.push_back(GameScenario::from_json(doc));
            }
            json results = json::array();
            std::ostringstream table;
            table << "scenario,game_type,seed,operational_before,operational_after_hardened,operational_after_unhardened\n";
            for (std::size_t i = 0; i < scenarios.size(); ++i) {
                GameOutcome o = run_game(n, scenarios[i]);
                results.push_back({{"scenario", scenarios[i].to_json()}, {"outcome", to_json(o)}});
                table << i << ',' << o.game_type << ',' << scenarios[i].seed << ',' << o.operational_before << ','
                      << o.operational_after_hardened << ',' << o.operational_after_unhardened << '\n';
            }
            if (csv) {
                std::cout << table.str();
                return 0;
            }
            if (scenarios.size() == 1) {
                c.solver = to_string(scenarios[0].solver);
                c.metric = to_string(scenarios[0].metric);
                c.model = to_string(scenarios[0].model);
                c.mode = to_string(scenarios[0].mode);
                run.describe(c, scenarios[0].seed);
            } else {
                // Each result embeds its own scenario.
                run.report["seed"] = nullptr;
            }
            run.report["result"] = results;
            run.emit(c);
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
