#include "netdetect/io.hpp"

#include "netdetect/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace netdetect {

namespace {

std::string kind_name(NodeDistribution::Kind k) {
    switch (k) {
        case NodeDistribution::Kind::bernoulli: return "bernoulli";
        case NodeDistribution::Kind::gaussian: return "gaussian";
        case NodeDistribution::Kind::categorical: return "categorical";
    }
    return "unknown";
}

Json optional_array(const std::vector<std::optional<double>>& values) {
    Json arr = Json::array();
    for (const auto& v : values) arr.push_back(v ? Json(*v) : Json(nullptr));
    return arr;
}

const Json& require_field(const Json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "'");
    return doc.at(key);
}

// RFC 4180 fields: quoted fields may hold commas and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                out.back() += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else if (c != '\r') {
            out.back() += c;
        }
    }
    return out;
}

template <class T>
T parse_cell(const std::string& cell) {
    T value{};
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) throw std::invalid_argument(cell);
    return value;
}

}  // namespace

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + '"';
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Json graph_to_json(const DirectedGraph& g, const WeightMatrix* weights) {
    Json doc;
    doc["n"] = g.size();
    Json edges = Json::array();
    for (const auto& [i, j] : g.edges()) edges.push_back({i, j});
    doc["edges"] = std::move(edges);
    if (weights) {
        Json rows = Json::array();
        for (std::size_t i = 0; i < weights->size(); ++i) {
            Json row = Json::array();
            for (std::size_t j = 0; j < weights->size(); ++j) row.push_back((*weights)(i, j));
            rows.push_back(std::move(row));
        }
        doc["weights"] = std::move(rows);
    }
    return doc;
}

WeightMatrix GraphDocument::weight_matrix() const { return weights ? *weights : uniform_weights(graph); }

GraphDocument graph_from_json(const Json& doc) {
    try {
        const auto n = require_field(doc, "n").get<std::size_t>();
        DirectedGraph g(n);
        for (const auto& e : require_field(doc, "edges")) {
            if (!e.is_array() || e.size() != 2) throw InvalidArgument("each edge must be a pair [i, j]");
            g.add_edge(e[0].get<std::size_t>(), e[1].get<std::size_t>());
        }
        GraphDocument out{std::move(g), std::nullopt};
        if (doc.contains("weights")) {
            const auto rows = doc.at("weights").get<std::vector<std::vector<double>>>();
            if (rows.size() != n) throw InvalidArgument("weights must be an n x n matrix");
            Eigen::MatrixXd w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) {
                if (rows[i].size() != n) throw InvalidArgument("weights must be an n x n matrix");
                for (std::size_t j = 0; j < n; ++j)
                    w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
            }
            out.weights.emplace(std::move(w), out.graph);
        }
        return out;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed graph document: ") + e.what());
    }
}

Json model_to_json(const NetworkModel& model) {
    Json doc;
    doc["n"] = model.size();
    doc["M"] = model.hypotheses();
    Json nodes = Json::array();
    for (std::size_t i = 0; i < model.size(); ++i) {
        Json node;
        const auto kind = model.node(i, 0).kind();
        node["kind"] = kind_name(kind);
        Json params = Json::object();
        for (std::size_t th = 0; th < model.hypotheses(); ++th) {
            const auto& d = model.node(i, th);
            const std::string k = std::to_string(th);
            switch (kind) {
                case NodeDistribution::Kind::bernoulli: params["p" + k] = d.p(); break;
                case NodeDistribution::Kind::gaussian:
                    params["mean" + k] = d.mean();
                    params["variance" + k] = d.variance();
                    break;
                case NodeDistribution::Kind::categorical: params["probs" + k] = d.probs(); break;
            }
        }
        node["params"] = std::move(params);
        nodes.push_back(std::move(node));
    }
    doc["nodes"] = std::move(nodes);
    return doc;
}

NetworkModel model_from_json(const Json& doc) {
    try {
        const auto n = require_field(doc, "n").get<std::size_t>();
        const auto m = doc.contains("M") ? doc.at("M").get<std::size_t>() : std::size_t{2};
        const auto& nodes = require_field(doc, "nodes");
        if (nodes.size() != n) throw InvalidArgument("model lists " + std::to_string(nodes.size()) + " nodes, n=" +
                                                     std::to_string(n));
        std::vector<std::vector<NodeDistribution>> dist;
        for (const auto& node : nodes) {
            const auto kind = require_field(node, "kind").get<std::string>();
            const auto& params = require_field(node, "params");
            std::vector<NodeDistribution> row;
            for (std::size_t th = 0; th < m; ++th) {
                const std::string k = std::to_string(th);
                if (kind == "bernoulli") {
                    row.push_back(NodeDistribution::bernoulli(require_field(params, ("p" + k).c_str()).get<double>()));
                } else if (kind == "gaussian") {
                    row.push_back(NodeDistribution::gaussian(require_field(params, ("mean" + k).c_str()).get<double>(),
                                                             require_field(params, ("variance" + k).c_str()).get<double>()));
                } else if (kind == "categorical") {
                    row.push_back(NodeDistribution::categorical(
                        require_field(params, ("probs" + k).c_str()).get<std::vector<double>>()));
                } else {
                    throw InvalidArgument("unknown distribution kind '" + kind + "'");
                }
            }
            dist.push_back(std::move(row));
        }
        return NetworkModel(std::move(dist));
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed model document: ") + e.what());
    }
}

Json report_to_json(const ExponentReport& r) {
    Json doc;
    doc["general"] = r.general ? Json(*r.general) : Json(nullptr);
    doc["lambda_star"] = r.lambda_star ? Json(*r.lambda_star) : Json(nullptr);
    doc["optimal"] = r.optimal;
    doc["bayes"] = r.bayes;
    doc["theta_star"] = r.theta_star;
    doc["period"] = r.period;
    doc["periodic"] = r.periodic ? Json(*r.periodic) : Json(nullptr);
    doc["deviation_factor"] = r.factor == DeviationFactor::classical ? "classical" : "stated";
    doc["cnp"] = optional_array(r.cnp);
    doc["cb"] = optional_array(r.cb);
    doc["delay"] = optional_array(r.delay);
    doc["gaussian_bound"] = optional_array(r.gaussian_bound);
    return doc;
}

void write_error_csv_header(std::ostream& os) {
    os << "scenario,node,t,alpha,beta,bayes_risk,stderr_alpha,stderr_beta,trials\n";
}

void write_error_csv(std::ostream& os, const std::string& scenario, const std::vector<ErrorCurve>& curves) {
    for (const auto& curve : curves)
        for (const auto& p : curve.points) {
            os << csv_field(scenario) << ',' << curve.node << ',' << p.t << ',' << format_double(p.alpha) << ','
               << format_double(p.beta) << ',' << format_double(p.bayes_risk) << ',' << format_double(p.stderr_alpha)
               << ',' << format_double(p.stderr_beta) << ',' << p.trials << '\n';
        }
}

std::vector<ErrorRow> read_error_csv(std::istream& is) {
    std::vector<ErrorRow> rows;
    std::string line;
    if (!std::getline(is, line)) throw InvalidArgument("empty error CSV");
    const auto header = split_csv_line(line);
    if (header.size() != 9 || header[0] != "scenario" || header[4] != "beta") {
        throw InvalidArgument("unexpected error CSV header: " + line);
    }
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 9) throw InvalidArgument("error CSV line " + std::to_string(lineno) + " has the wrong arity");
        try {
            rows.push_back({cells[0], parse_cell<std::size_t>(cells[1]), parse_cell<std::size_t>(cells[2]),
                            parse_cell<double>(cells[3]), parse_cell<double>(cells[4]), parse_cell<double>(cells[5]),
                            parse_cell<double>(cells[6]), parse_cell<double>(cells[7]),
                            parse_cell<std::size_t>(cells[8])});
        } catch (const std::logic_error&) {
            throw InvalidArgument("error CSV line " + std::to_string(lineno) + " is not numeric");
        }
    }
    return rows;
}

void write_trace_csv_header(std::ostream& os) { os << "trial,t,node,ell,mu,pi_hat\n"; }

void write_trace_csv(std::ostream& os, std::size_t trial, const RunTrace& trace) {
    for (std::size_t t = 0; t < trace.rounds.size(); ++t) {
        const auto& s = trace.rounds[t];
        for (std::size_t i = 0; i < s.size(); ++i) {
            os << trial << ',' << t << ',' << i << ',' << format_double(s.ell[i]) << ',' << format_double(s.mu[i])
               << ',' << format_double(s.pi_hat[i]) << '\n';
        }
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace netdetect
