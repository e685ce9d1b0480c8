#include "netdetect/harness.hpp"

#include "netdetect/config.hpp"
#include "netdetect/errors.hpp"
#include "netdetect/simulation.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace netdetect {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out = "invalid configuration:";
    for (const auto& l : lines) out += "\n  - " + l;
    return out;
}

// Typed access to a config document that records every problem instead of stopping at
// the first one, and reports keys nobody asked for.
class DocReader {
public:
    explicit DocReader(const Json& doc) : doc_(doc) {
        if (!doc_.is_object()) problems.push_back("document is not a table");
    }

    std::vector<std::string> problems;

    const Json* find(const std::string& section, const std::string& key) {
        used_.insert(section + "." + key);
        if (!doc_.contains(section) || !doc_.at(section).contains(key)) return nullptr;
        return &doc_.at(section).at(key);
    }

    bool has(const std::string& section, const std::string& key) { return find(section, key) != nullptr; }

    std::string name(const std::string& section, const std::string& key) const {
        return section.empty() ? key : section + "." + key;
    }

    std::optional<std::string> string(const std::string& section, const std::string& key) {
        const Json* v = find(section, key);
        if (!v) return std::nullopt;
        if (!v->is_string()) {
            problems.push_back(name(section, key) + " must be a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    std::optional<double> number(const std::string& section, const std::string& key) {
        const Json* v = find(section, key);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            problems.push_back(name(section, key) + " must be a number");
            return std::nullopt;
        }
        return v->get<double>();
    }

    static std::optional<std::size_t> as_count(const Json& v) {
        if (v.is_number_unsigned()) return v.get<std::size_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::size_t>(v.get<std::int64_t>());
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0.0 && std::floor(d) == d && d < 1e18) return static_cast<std::size_t>(d);
        }
        return std::nullopt;
    }

    std::optional<std::size_t> count(const std::string& section, const std::string& key) {
        const Json* v = find(section, key);
        if (!v) return std::nullopt;
        auto c = as_count(*v);
        if (!c) problems.push_back(name(section, key) + " must be a non-negative integer");
        return c;
    }

    std::optional<bool> boolean(const std::string& section, const std::string& key) {
        const Json* v = find(section, key);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) {
            problems.push_back(name(section, key) + " must be true or false");
            return std::nullopt;
        }
        return v->get<bool>();
    }

    template <class T>
    std::optional<T> typed(const std::string& section, const std::string& key, const char* expected) {
        const Json* v = find(section, key);
        if (!v) return std::nullopt;
        try {
            return v->get<T>();
        } catch (const Json::exception&) {
            problems.push_back(name(section, key) + " must be " + expected);
            return std::nullopt;
        }
    }

    void report_unknown() {
        if (!doc_.is_object()) return;
        for (const auto& [section, table] : doc_.items()) {
            if (section == "sweep") continue;
            if (!table.is_object()) {
                problems.push_back("'" + section + "' must be a table");
                continue;
            }
            for (const auto& [key, _] : table.items())
                if (!used_.count(section + "." + key)) problems.push_back("unknown key " + name(section, key));
        }
    }

    template <class F>
    void attempt(const std::string& what, F&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            problems.push_back(what + ": " + e.what());
        } catch (const Json::exception& e) {
            problems.push_back(what + ": " + e.what());
        }
    }

private:
    const Json& doc_;
    std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

std::optional<WeightMatrix> read_network(DocReader& r, const std::filesystem::path& base) {
    const auto source = r.string("network", "source").value_or("explicit");
    std::optional<WeightMatrix> out;
    if (source == "explicit") {
        const auto rows = r.typed<std::vector<std::vector<double>>>("network", "weights", "a matrix of numbers");
        if (!rows) {
            r.problems.push_back("network.weights is required for an explicit network");
            return out;
        }
        r.attempt("network.weights", [&] { out.emplace(WeightMatrix::from_rows(*rows)); });
        return out;
    }
    if (source == "file") {
        const auto file = r.string("network", "file");
        if (!file) {
            r.problems.push_back("network.file is required for source = \"file\"");
            return out;
        }
        r.attempt("network.file", [&] { out.emplace(graph_from_json(Json::parse(read_text(resolve(base, *file)))).weight_matrix()); });
        return out;
    }

    const auto n = r.count("network", "n");
    const bool self_loops = r.boolean("network", "self_loops").value_or(true);
    if (!n) {
        r.problems.push_back("network.n is required for source = \"" + source + "\"");
        return out;
    }
    r.attempt("network", [&] {
        if (source == "scale_free") {
            const auto m = r.count("network", "m").value_or(2);
            const auto seed = r.count("network", "seed").value_or(7);
            out.emplace(uniform_weights(generate_scale_free(*n, m, seed)));
        } else if (source == "ring") {
            out.emplace(uniform_weights(bidirectional_ring(*n, self_loops)));
        } else if (source == "complete") {
            out.emplace(uniform_weights(complete_graph(*n, self_loops)));
        } else if (source == "cycle") {
            out.emplace(uniform_weights(directed_cycle(*n)));
        } else {
            throw InvalidArgument("unknown source '" + source + "'");
        }
    });
    return out;
}

template <class T>
std::vector<T> broadcast(const Json* v, std::size_t n) {
    if (v->is_array()) return v->get<std::vector<T>>();
    return std::vector<T>(n, v->get<T>());
}

std::optional<NetworkModel> read_model(DocReader& r, const std::filesystem::path& base, std::size_t n) {
    const auto kind = r.string("model", "kind").value_or("bernoulli");
    std::optional<NetworkModel> out;
    if (kind == "file") {
        const auto file = r.string("model", "file");
        if (!file) {
            r.problems.push_back("model.file is required for kind = \"file\"");
            return out;
        }
        r.attempt("model.file", [&] { out.emplace(model_from_json(Json::parse(read_text(resolve(base, *file))))); });
        return out;
    }
    r.attempt("model", [&] {
        std::vector<std::pair<NodeDistribution, NodeDistribution>> nodes;
        if (kind == "bernoulli") {
            const Json* p0 = r.find("model", "p0");
            const Json* p1 = r.find("model", "p1");
            if (!p0 || !p1) throw InvalidArgument("p0 and p1 are required");
            const auto a = broadcast<double>(p0, n), b = broadcast<double>(p1, n);
            if (a.size() != n || b.size() != n) throw InvalidArgument("p0/p1 arrays must have one entry per node");
            for (std::size_t i = 0; i < n; ++i)
                nodes.emplace_back(NodeDistribution::bernoulli(a[i]), NodeDistribution::bernoulli(b[i]));
        } else if (kind == "gaussian") {
            const double mean = r.number("model", "mean").value_or(1.0);
            const double var = r.number("model", "variance").value_or(1.0);
            for (std::size_t i = 0; i < n; ++i)
                nodes.emplace_back(NodeDistribution::gaussian(-mean, var), NodeDistribution::gaussian(mean, var));
        } else if (kind == "categorical") {
            const auto probs = r.typed<std::vector<Vector>>("model", "probs", "a list of probability vectors");
            if (!probs || probs->size() < 2) throw InvalidArgument("probs needs one vector per hypothesis");
            std::vector<std::vector<NodeDistribution>> dist(n);
            for (auto& row : dist)
                for (const auto& p : *probs) row.push_back(NodeDistribution::categorical(p));
            out.emplace(std::move(dist));
            return;
        } else {
            throw InvalidArgument("unknown kind '" + kind + "'");
        }
        out.emplace(NetworkModel::binary(nodes));
    });
    return out;
}

WeightPolicy parse_policy(const std::string& s) {
    if (s == "ones") return WeightPolicy::ones;
    if (s == "inverse-pi-oracle") return WeightPolicy::inverse_pi_oracle;
    if (s == "inverse-pi-estimated") return WeightPolicy::inverse_pi_estimated;
    throw InvalidArgument("unknown r_policy '" + s + "'");
}

std::string value_label(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string manifest_entry_path(const std::filesystem::path& root, const std::filesystem::path& file) {
    return std::filesystem::relative(file, root).generic_string();
}

void write_manifest(const std::filesystem::path& dir, const std::string& scenario, std::uint64_t seed,
                    const Json& config, std::vector<std::filesystem::path>& files) {
    Json entries = Json::array();
    for (const auto& f : files) {
        const std::string content = read_text(f);
        entries.push_back({{"path", manifest_entry_path(dir, f)},
                           {"git_blob_sha1", git_blob_hash(content)},
                           {"bytes", content.size()}});
    }
    Json manifest;
    manifest["scenario"] = scenario;
    manifest["master_seed"] = seed;
    manifest["config"] = config;
    manifest["files"] = std::move(entries);
    const auto path = dir / "manifest.json";
    write_text(path, manifest.dump(2) + "\n");
    files.push_back(path);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : InvalidArgument(join_lines(problems)), problems_(std::move(problems)) {}

std::string to_string(WeightPolicy p) {
    switch (p) {
        case WeightPolicy::ones: return "ones";
        case WeightPolicy::inverse_pi_oracle: return "inverse-pi-oracle";
        case WeightPolicy::inverse_pi_estimated: return "inverse-pi-estimated";
    }
    return "unknown";
}

ExperimentConfig load_config(const Json& doc, const std::filesystem::path& base_dir) {
    DocReader r(doc);
    if (!r.problems.empty()) throw ConfigError(r.problems);

    const auto scenario = r.string("", "scenario");
    if (!scenario || scenario->empty()) r.problems.push_back("scenario is required");
    const auto output = r.string("", "output");

    auto weights = read_network(r, base_dir);
    std::optional<NetworkModel> model;
    if (weights) {
        model = read_model(r, base_dir, weights->size());
        if (model && model->size() != weights->size()) {
            r.problems.push_back("model has " + std::to_string(model->size()) + " nodes but the network has " +
                                 std::to_string(weights->size()));
        }
    }

    Rule rule = Rule::modified;
    r.attempt("run.rule", [&] { rule = parse_rule(r.string("run", "rule").value_or("modified")); });
    WeightPolicy policy = WeightPolicy::ones;
    r.attempt("run.r_policy", [&] { policy = parse_policy(r.string("run", "r_policy").value_or("ones")); });

    std::optional<std::size_t> t_e = 0;
    if (const Json* v = r.find("run", "T_E")) {
        if (v->is_string() && (v->get<std::string>() == "inf" || v->get<std::string>() == "oracle")) {
            t_e.reset();
        } else if (auto c = DocReader::as_count(*v)) {
            t_e = *c;
        } else {
            r.problems.push_back("run.T_E must be a non-negative integer or \"inf\"");
        }
    }

    auto horizon = r.count("run", "horizon");
    if (const auto t_el = r.count("run", "T_EL")) {
        if (horizon && *horizon != *t_el) r.problems.push_back("run.horizon and run.T_EL disagree");
        horizon = t_el;
    }
    if (!horizon) horizon = 100;
    if (*horizon < 1) r.problems.push_back("run.horizon must be at least 1");
    const auto trials = r.count("run", "trials").value_or(10000);
    if (trials < 1) r.problems.push_back("run.trials must be at least 1");
    const auto seed = r.count("run", "seed").value_or(1);

    QuantizerConfig quantizer;
    if (const Json* v = r.find("run", "b")) {
        if (v->is_string() && v->get<std::string>() == "none") {
            quantizer.bits.reset();
        } else if (auto c = DocReader::as_count(*v); c && *c >= 1 && *c <= 52) {
            quantizer.bits = static_cast<int>(*c);
        } else {
            r.problems.push_back("run.b must be an integer in [1, 52] or \"none\"");
        }
    }
    quantizer.quantize_estimates = r.boolean("run", "quantize_estimates").value_or(true);

    DecisionTest test;
    const auto test_kind = r.string("run", "test").value_or("np");
    const double epsilon = r.number("run", "epsilon").value_or(0.05);
    const double xi0 = r.number("run", "xi0").value_or(0.5);
    if (!(xi0 > 0.0 && xi0 < 1.0)) r.problems.push_back("run.xi0 must lie in (0,1)");
    if (test_kind == "np") {
        if (!(epsilon > 0.0 && epsilon < 1.0)) r.problems.push_back("run.epsilon must lie in (0,1)");
        if (trials < kMinCalibrationTrials && rule != Rule::estimation_only) {
            r.problems.push_back("np tests need at least " + std::to_string(kMinCalibrationTrials) + " trials");
        }
        test = DecisionTest::neyman_pearson(epsilon);
        test.xi0 = xi0;
        test.xi1 = 1.0 - xi0;
    } else if (test_kind == "bayes") {
        test = DecisionTest::bayes(xi0, 1.0 - xi0);
    } else {
        r.problems.push_back("run.test must be \"np\" or \"bayes\"");
    }

    std::vector<std::size_t> nodes{0};
    if (const Json* v = r.find("run", "nodes")) {
        if (v->is_string() && v->get<std::string>() == "all") {
            nodes.clear();
            if (weights)
                for (std::size_t i = 0; i < weights->size(); ++i) nodes.push_back(i);
        } else if (auto list = r.typed<std::vector<std::size_t>>("run", "nodes", "a list of node indices or \"all\"")) {
            nodes = *list;
        }
    }
    if (weights)
        for (std::size_t i : nodes)
            if (i >= weights->size()) r.problems.push_back("run.nodes entry " + std::to_string(i) + " out of range");

    const auto trace_trials = r.count("run", "trace_trials").value_or(1);
    const auto window = r.count("run", "exponent_window").value_or(50);
    DeviationFactor factor = DeviationFactor::classical;
    if (const auto f = r.string("run", "deviation_factor")) {
        if (*f == "stated") factor = DeviationFactor::stated;
        else if (*f != "classical") r.problems.push_back("run.deviation_factor must be \"classical\" or \"stated\"");
    }
    Execution execution = Execution::parallel;
    if (const auto e = r.string("run", "execution")) {
        if (*e == "serial") execution = Execution::serial;
        else if (*e != "parallel") r.problems.push_back("run.execution must be \"serial\" or \"parallel\"");
    }

    if (model && rule != Rule::estimation_only && rule != Rule::original && model->hypotheses() != 2) {
        r.problems.push_back("rule '" + to_string(rule) + "' needs a binary model");
    }
    if (model && rule != Rule::estimation_only && model->hypotheses() != 2) {
        r.problems.push_back("error curves are produced for binary models only");
    }
    r.report_unknown();
    if (!r.problems.empty() || !weights || !model) {
        if (r.problems.empty()) r.problems.push_back("network or model could not be built");
        throw ConfigError(r.problems);
    }

    ExperimentConfig cfg(std::move(*weights), std::move(*model));
    cfg.scenario = *scenario;
    cfg.output = output ? resolve(base_dir, *output) : resolve(base_dir, "out/" + *scenario);
    cfg.rule = rule;
    cfg.policy = policy;
    cfg.estimation_rounds = t_e;
    cfg.horizon = *horizon;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.quantizer = quantizer;
    cfg.test = test;
    cfg.nodes = nodes;
    cfg.trace_trials = trace_trials;
    cfg.exponent_window = window;
    cfg.factor = factor;
    cfg.execution = execution;
    cfg.document = doc;
    return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    return load_config(parse_config(read_text(path)), path.parent_path());
}

ScenarioResult run_scenario(const ExperimentConfig& cfg) {
    const Network net = analyze(cfg.weights);
    if (!net.profile.irreducible) net.require_ergodic();
    const std::size_t n = net.size();
    const auto& pi = net.profile.pi;

    ScenarioResult result{cfg.output, {}, {}, std::nullopt, {}};
    std::filesystem::create_directories(cfg.output);

    // Stationary estimate shared by every trial of this scenario.
    const std::uint64_t estimation_seed = derive_seed(cfg.seed, streams::estimation, 0);
    std::optional<EstimationRun> estimation;
    const bool uses_estimate = cfg.rule == Rule::combined || cfg.rule == Rule::estimation_only ||
                               cfg.policy == WeightPolicy::inverse_pi_estimated;
    if (uses_estimate && cfg.estimation_rounds) {
        const std::size_t rounds = cfg.rule == Rule::estimation_only ? cfg.horizon : *cfg.estimation_rounds;
        net.require_ergodic();
        estimation = run_estimation(net, rounds, estimation_seed);
    }

    Vector r(n, 1.0);
    if (cfg.policy == WeightPolicy::inverse_pi_oracle ||
        (cfg.policy == WeightPolicy::inverse_pi_estimated && !cfg.estimation_rounds)) {
        r = inverse_weights(pi);
    } else if (cfg.policy == WeightPolicy::inverse_pi_estimated) {
        r = inverse_weights(estimation->pi_hat);
    }

    SimulationSpec spec;
    spec.rule = cfg.rule;
    spec.r = r;
    spec.quantizer = cfg.quantizer;
    spec.horizon = cfg.horizon;
    spec.record_times = default_sample_times(cfg.horizon);
    spec.record_nodes = cfg.nodes;
    if (cfg.rule == Rule::combined) {
        if (cfg.estimation_rounds) {
            spec.initial_estimate = estimation->initial;
            spec.estimation_rounds = *cfg.estimation_rounds;
        } else {
            // Oracle limit: the estimate has already converged to s pi.
            const Vector start = initial_estimate(n, estimation_seed);
            double mass = 0.0;
            for (double v : start) mass += v;
            spec.initial_estimate.resize(n);
            for (std::size_t i = 0; i < n; ++i) spec.initial_estimate[i] = mass * pi[i];
        }
    }

    if (cfg.rule != Rule::estimation_only) {
        MonteCarloConfig mc{spec, cfg.test, cfg.trials, cfg.seed, cfg.execution, 8192};
        result.curves = monte_carlo_errors(cfg.model, net, mc);
        std::ostringstream csv;
        write_error_csv_header(csv);
        write_error_csv(csv, cfg.scenario, result.curves);
        const auto path = cfg.output / "errors.csv";
        write_text(path, csv.str());
        result.files.push_back(path);

        if (!result.curves.empty()) {
            Vector times, betas;
            for (const auto& p : result.curves.front().points) {
                times.push_back(static_cast<double>(p.t));
                betas.push_back(cfg.test.kind == DecisionTest::Kind::bayes ? p.bayes_risk : p.beta);
            }
            try {
                result.empirical = empirical_exponent(times, betas, cfg.exponent_window);
            } catch (const InvalidArgument&) {
                result.empirical.reset();
            }
        }

        std::ostringstream trace_csv;
        write_trace_csv_header(trace_csv);
        for (std::size_t k = 0; k < cfg.trace_trials; ++k)
            write_trace_csv(trace_csv, k, trace_run(spec, cfg.model, net.weights, 0, cfg.seed, k));
        const auto trace_path = cfg.output / "trace.csv";
        write_text(trace_path, trace_csv.str());
        result.files.push_back(trace_path);
    }

    if (estimation) {
        std::ostringstream csv;
        csv << "round,error,bound\n";
        for (std::size_t t = 0; t < estimation->error_trace.size(); ++t) {
            csv << t << ',' << format_double(estimation->error_trace[t]) << ',';
            if (net.profile.reversible && net.profile.aperiodic)
                csv << format_double(estimation_error_bound(net, estimation->initial, t, cfg.factor));
            csv << '\n';
        }
        const auto path = cfg.output / "estimation.csv";
        write_text(path, csv.str());
        result.files.push_back(path);
    }

    if (cfg.model.hypotheses() == 2) {
        result.report = exponent_report(cfg.model, net, r, cfg.factor);
        Json doc;
        doc["scenario"] = cfg.scenario;
        doc["rule"] = to_string(cfg.rule);
        doc["r_policy"] = to_string(cfg.policy);
        doc["r"] = r;
        doc["rho"] = net.profile.rho;
        doc["pi"] = pi;
        doc["imbalance_tv"] = imbalance(pi, ImbalanceNorm::tv);
        doc["report"] = report_to_json(result.report);
        if (result.empirical) {
            doc["empirical"] = {{"slope", result.empirical->slope},
                                {"slope_stderr", result.empirical->slope_stderr},
                                {"r_squared", result.empirical->r_squared},
                                {"points", result.empirical->points},
                                {"window", cfg.exponent_window}};
        } else {
            doc["empirical"] = nullptr;
        }
        const auto path = cfg.output / "exponents.json";
        write_text(path, doc.dump(2) + "\n");
        result.files.push_back(path);
    }

    write_manifest(cfg.output, cfg.scenario, cfg.seed, cfg.document, result.files);
    return result;
}

SweepAxis resolve_axis(const Json& doc, const std::string& axis) {
    if (axis == "variant") return {"run", "variant"};
    if (const auto dot = axis.find('.'); dot != std::string::npos) return {axis.substr(0, dot), axis.substr(dot + 1)};
    static const std::map<std::string, std::string> known = {
        {"b", "run"},      {"T_E", "run"},         {"T_EL", "run"},     {"horizon", "run"},
        {"trials", "run"}, {"seed", "run"},        {"epsilon", "run"},  {"rule", "run"},
        {"r_policy", "run"}, {"xi0", "run"},       {"quantize_estimates", "run"}};
    std::vector<std::string> sections;
    for (const auto& [section, table] : doc.items())
        if (section != "sweep" && table.is_object() && table.contains(axis)) sections.push_back(section);
    if (sections.size() == 1) return {sections.front(), axis};
    if (sections.size() > 1) throw InvalidArgument("axis '" + axis + "' is ambiguous; use section.key");
    if (const auto it = known.find(axis); it != known.end()) return {it->second, axis};
    throw InvalidArgument("unknown sweep axis '" + axis + "'");
}

SweepResult sweep(const Json& doc, const std::string& axis, const std::vector<Json>& values,
                  const std::filesystem::path& base_dir) {
    const SweepAxis target = resolve_axis(doc, axis);
    if (values.empty()) throw InvalidArgument("sweep needs at least one value");

    Json base = doc;
    base.erase("sweep");
    const std::string scenario = base.contains("") && base[""].contains("scenario") && base[""]["scenario"].is_string()
                                     ? base[""]["scenario"].get<std::string>()
                                     : std::string("sweep");
    const std::filesystem::path root =
        base[""].contains("output") && base[""]["output"].is_string()
            ? resolve(base_dir, base[""]["output"].get<std::string>())
            : resolve(base_dir, "out/" + scenario);

    // Validate every variant before running any of them.
    std::vector<ExperimentConfig> configs;
    std::vector<std::string> problems;
    for (const auto& value : values) {
        Json variant = base;
        const std::string label = value_label(value);
        if (target.key == "variant") {
            const auto s = label;
            const auto colon = s.find(':');
            variant["run"]["rule"] = s.substr(0, colon);
            if (colon != std::string::npos) variant["run"]["r_policy"] = s.substr(colon + 1);
        } else {
            variant[target.section][target.key] = value;
        }
        variant[""]["scenario"] = scenario + "[" + axis + "=" + label + "]";
        variant[""]["output"] = (root / (axis + "=" + label)).string();
        try {
            configs.push_back(load_config(variant, {}));
        } catch (const ConfigError& e) {
            for (const auto& p : e.problems()) problems.push_back(axis + "=" + label + ": " + p);
        } catch (const Error& e) {
            problems.push_back(axis + "=" + label + ": " + e.what());
        }
    }
    if (!problems.empty()) throw ConfigError(problems);

    SweepResult out{root, {}};
    std::ostringstream merged, index;
    write_error_csv_header(merged);
    index << "axis,value,output,empirical_slope,empirical_stderr,general,optimal\n";
    for (std::size_t k = 0; k < configs.size(); ++k) {
        auto res = run_scenario(configs[k]);
        write_error_csv(merged, configs[k].scenario, res.curves);
        index << csv_field(axis) << ',' << csv_field(value_label(values[k])) << ','
              << csv_field(manifest_entry_path(root, res.output)) << ','
              << (res.empirical ? format_double(res.empirical->slope) : "") << ','
              << (res.empirical ? format_double(res.empirical->slope_stderr) : "") << ','
              << (res.report.general ? format_double(*res.report.general) : "") << ','
              << format_double(res.report.optimal) << '\n';
        out.runs.push_back(std::move(res));
    }
    std::vector<std::filesystem::path> files{root / "errors.csv", root / "index.csv"};
    write_text(files[0], merged.str());
    write_text(files[1], index.str());
    Json echo = doc;
    write_manifest(root, scenario, configs.front().seed, echo, files);
    return out;
}

void run_document(const Json& doc, const std::filesystem::path& base_dir) {
    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        if (!s.contains("axis") || !s.at("axis").is_string() || !s.contains("values") || !s.at("values").is_array()) {
            throw ConfigError({"[sweep] needs axis (string) and values (array)"});
        }
        sweep(doc, s.at("axis").get<std::string>(), s.at("values").get<std::vector<Json>>(), base_dir);
        return;
    }
    run_scenario(load_config(doc, base_dir));
}

std::string git_blob_hash(const std::string& content) {
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                    EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &length) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw Error("sha1 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned k = 0; k < length; ++k) {
        const unsigned char c = digest[k];
        std::snprintf(buf, sizeof buf, "%02x", c);
        hex += buf;
    }
    return hex;
}

}  // namespace netdetect
