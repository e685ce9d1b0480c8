// netdetect command-line front end.
//
//   netdetect run <config> [--trials N] [--seed S] [--output DIR]
//   netdetect sweep <config> --axis NAME --values V1,V2,...
//   netdetect analyze <errors.csv> --exponent-window W [--column beta]
//   netdetect graph gen --topology scale_free --n 100 [--m 2] [--seed 7] [--out g.json]
//   netdetect graph inspect <graph.json>
//
// Exit status: 0 on success, 2 when the input fails validation, 1 on any other error.

#include "netdetect/config.hpp"
#include "netdetect/errors.hpp"
#include "netdetect/exponents.hpp"
#include "netdetect/graph_markov.hpp"
#include "netdetect/harness.hpp"
#include "netdetect/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace netdetect;

namespace {

constexpr int kValidationExit = 2;

std::vector<Json> split_values(const std::string& list) {
    std::vector<Json> out;
    std::string cell;
    int depth = 0;
    for (char c : list) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(parse_config_value(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    if (!cell.empty()) out.push_back(parse_config_value(cell));
    return out;
}

Json load_document(const std::string& path) { return parse_config(read_text(path)); }

void override_run(Json& doc, const char* key, const Json& value) { doc["run"][key] = value; }

int cmd_run(const std::string& path, std::optional<std::size_t> trials, std::optional<std::uint64_t> seed,
            const std::string& output) {
    Json doc = load_document(path);
    if (trials) override_run(doc, "trials", *trials);
    if (seed) override_run(doc, "seed", *seed);
    if (!output.empty()) doc[""]["output"] = std::filesystem::absolute(output).string();
    const auto base = std::filesystem::path(path).parent_path();
    if (doc.contains("sweep")) {
        run_document(doc, base);
        std::cout << "sweep finished\n";
        return 0;
    }
    const auto result = run_scenario(load_config(doc, base));
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    if (result.empirical) {
        std::cout << "empirical exponent " << format_double(result.empirical->slope) << " +- "
                  << format_double(result.empirical->slope_stderr) << '\n';
    }
    return 0;
}

int cmd_sweep(const std::string& path, const std::string& axis, const std::string& values) {
    Json doc = load_document(path);
    const auto result = sweep(doc, axis, split_values(values), std::filesystem::path(path).parent_path());
    std::cout << result.runs.size() << " runs written under " << result.output.string() << '\n';
    return 0;
}

int cmd_analyze(const std::string& path, std::size_t window, const std::string& column, double min_count) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    const auto rows = read_error_csv(in);
    std::map<std::pair<std::string, std::size_t>, std::pair<Vector, Vector>> series;
    std::map<std::pair<std::string, std::size_t>, std::size_t> trials;
    for (const auto& row : rows) {
        double value;
        if (column == "beta") value = row.beta;
        else if (column == "alpha") value = row.alpha;
        else if (column == "bayes_risk") value = row.bayes_risk;
        else throw InvalidArgument("--column must be alpha, beta or bayes_risk");
        auto& s = series[{row.scenario, row.node}];
        s.first.push_back(static_cast<double>(row.t));
        s.second.push_back(value);
        trials[{row.scenario, row.node}] = row.trials;
    }
    Json out = Json::array();
    for (const auto& [key, s] : series) {
        Json entry{{"scenario", key.first}, {"node", key.second}, {"column", column}};
        try {
            const auto fit = empirical_exponent(s.first, s.second, window, trials[key], min_count);
            entry["slope"] = fit.slope;
            entry["slope_stderr"] = fit.slope_stderr;
            entry["intercept"] = fit.intercept;
            entry["r_squared"] = fit.r_squared;
            entry["points"] = fit.points;
        } catch (const InvalidArgument& e) {
            entry["error"] = e.what();
        }
        out.push_back(std::move(entry));
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_graph_gen(const std::string& topology, std::size_t n, std::size_t m, std::uint64_t seed, bool self_loops,
                  const std::string& out_path) {
    DirectedGraph g(0);
    if (topology == "scale_free") g = generate_scale_free(n, m, seed);
    else if (topology == "ring") g = bidirectional_ring(n, self_loops);
    else if (topology == "complete") g = complete_graph(n, self_loops);
    else if (topology == "cycle") g = directed_cycle(n);
    else throw InvalidArgument("unknown topology '" + topology + "'");
    const auto text = graph_to_json(g).dump(2) + "\n";
    if (out_path.empty()) std::cout << text;
    else write_text(out_path, text);
    return 0;
}

int cmd_graph_inspect(const std::string& path) {
    const auto doc = graph_from_json(Json::parse(read_text(path)));
    const Network net = analyze(doc.weight_matrix());
    const auto& p = net.profile;
    Json out;
    out["n"] = net.size();
    out["edges"] = doc.graph.edges().size();
    out["irreducible"] = p.irreducible;
    out["aperiodic"] = p.aperiodic;
    out["period"] = p.period;
    out["reversible"] = p.reversible;
    out["rho"] = p.rho;
    out["pi"] = p.pi;
    out["imbalance_l2"] = imbalance(p.pi, ImbalanceNorm::l2);
    out["imbalance_tv"] = imbalance(p.pi, ImbalanceNorm::tv);
    if (!p.irreducible) {
        Json comps = Json::array();
        for (const auto& c : scc_decomposition(doc.graph)) comps.push_back(c);
        out["components"] = std::move(comps);
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed hypothesis testing simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::string output;
    auto* run = app.add_subcommand("run", "Run one scenario (or the sweep it declares)");
    run->add_option("config", config_path, "Scenario config")->required();
    run->add_option("--trials", trials, "Override run.trials");
    run->add_option("--seed", seed, "Override run.seed");
    run->add_option("--output", output, "Override the output directory");

    std::string axis, values;
    auto* sw = app.add_subcommand("sweep", "Run a scenario once per axis value");
    sw->add_option("config", config_path, "Scenario config")->required();
    sw->add_option("--axis", axis, "Config key to vary")->required();
    sw->add_option("--values", values, "Comma-separated values")->required();

    std::string csv_path, column = "beta";
    std::size_t window = 50;
    double min_count = 0.0;
    auto* an = app.add_subcommand("analyze", "Fit empirical error exponents to an error CSV");
    an->add_option("csv", csv_path, "errors.csv")->required();
    an->add_option("--exponent-window", window, "Number of trailing points to fit")->required();
    an->add_option("--column", column, "alpha, beta or bayes_risk");
    an->add_option("--min-count", min_count, "Minimum error count per usable point");

    auto* graph = app.add_subcommand("graph", "Generate or inspect graphs");
    graph->require_subcommand(1);
    std::string topology = "scale_free", out_path, graph_path;
    std::size_t n = 10, m = 2;
    std::uint64_t graph_seed = 7;
    bool no_self_loops = false;
    auto* gen = graph->add_subcommand("gen", "Generate a graph document");
    gen->add_option("--topology", topology, "scale_free, ring, complete or cycle");
    gen->add_option("--n", n, "Number of nodes");
    gen->add_option("--m", m, "Attachment parameter for scale_free");
    gen->add_option("--seed", graph_seed, "Generator seed");
    gen->add_flag("--no-self-loops", no_self_loops, "Omit self-loops (ring, complete)");
    gen->add_option("--out", out_path, "Write to a file instead of stdout");
    auto* inspect = graph->add_subcommand("inspect", "Print the Markov-chain profile of a graph document");
    inspect->add_option("graph", graph_path, "Graph JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidationExit;
    }

    try {
        if (*run) return cmd_run(config_path, trials, seed, output);
        if (*sw) return cmd_sweep(config_path, axis, values);
        if (*an) return cmd_analyze(csv_path, window, column, min_count);
        if (*gen) return cmd_graph_gen(topology, n, m, graph_seed, !no_self_loops, out_path);
        if (*inspect) return cmd_graph_inspect(graph_path);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kValidationExit;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
