#pragma once

// JSON and CSV encodings of graphs, models, traces, error curves and exponent reports.

#include "netdetect/detection.hpp"
#include "netdetect/exponents.hpp"
#include "netdetect/graph_markov.hpp"
#include "netdetect/hypothesis_model.hpp"
#include "netdetect/learning.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace netdetect {

using Json = nlohmann::ordered_json;

/// Quotes a CSV field when it holds a comma, quote or line break.
std::string csv_field(const std::string& text);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// {"n": int, "edges": [[i, j], ...], "weights": [[...], ...]}; weights optional.
Json graph_to_json(const DirectedGraph& g, const WeightMatrix* weights = nullptr);

struct GraphDocument {
    DirectedGraph graph;
    std::optional<WeightMatrix> weights;

    /// Explicit weights if present, otherwise uniform weights on the graph.
    WeightMatrix weight_matrix() const;
};

GraphDocument graph_from_json(const Json& doc);

/// {"n", "M", "nodes": [{"kind", "params"}]}. Params carry one entry per hypothesis:
/// bernoulli p0, p1, ...; gaussian mean0, variance0, ...; categorical probs0, probs1, ...
Json model_to_json(const NetworkModel& model);
NetworkModel model_from_json(const Json& doc);

Json report_to_json(const ExponentReport& report);

void write_error_csv_header(std::ostream& os);
void write_error_csv(std::ostream& os, const std::string& scenario, const std::vector<ErrorCurve>& curves);

/// Reads back (node, t, beta or alpha...) rows written by write_error_csv.
struct ErrorRow {
    std::string scenario;
    std::size_t node;
    std::size_t t;
    double alpha, beta, bayes_risk, stderr_alpha, stderr_beta;
    std::size_t trials;
};
std::vector<ErrorRow> read_error_csv(std::istream& is);

void write_trace_csv_header(std::ostream& os);
void write_trace_csv(std::ostream& os, std::size_t trial, const RunTrace& trace);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace netdetect
