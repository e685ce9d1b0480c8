#pragma once

// Scenario runner: validated experiment configs, reproducible Monte Carlo campaigns and
// the files they emit (error curves, exponent report, estimation trace, run trace,
// manifest).

#include "netdetect/detection.hpp"
#include "netdetect/errors.hpp"
#include "netdetect/exponents.hpp"
#include "netdetect/io.hpp"
#include "netdetect/learning.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace netdetect {

/// Carries every validation problem found in a config, one per line.
class ConfigError : public InvalidArgument {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

enum class WeightPolicy { ones, inverse_pi_oracle, inverse_pi_estimated };

std::string to_string(WeightPolicy p);

struct ExperimentConfig {
    ExperimentConfig(WeightMatrix w, NetworkModel m) : weights(std::move(w)), model(std::move(m)) {}

    std::string scenario;
    std::filesystem::path output;

    WeightMatrix weights;
    NetworkModel model;

    Rule rule = Rule::modified;
    WeightPolicy policy = WeightPolicy::ones;
    std::optional<std::size_t> estimation_rounds;  ///< T_E; empty means the oracle limit
    std::size_t horizon = 1;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    QuantizerConfig quantizer;
    DecisionTest test;
    std::vector<std::size_t> nodes;  ///< nodes with recorded error curves
    std::size_t trace_trials = 1;
    std::size_t exponent_window = 50;
    DeviationFactor factor = DeviationFactor::classical;
    Execution execution = Execution::parallel;

    Json document;  ///< validated source document, echoed into the manifest
};

/// Builds a config from a parsed document. Relative file references resolve against base_dir.
/// Throws ConfigError listing every problem.
ExperimentConfig load_config(const Json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config_file(const std::filesystem::path& path);

struct ScenarioResult {
    std::filesystem::path output;
    std::vector<std::filesystem::path> files;
    ExponentReport report;
    std::optional<ExponentFit> empirical;  ///< fit on the first recorded node's beta curve
    std::vector<ErrorCurve> curves;
};

/// Runs the scenario and writes errors.csv, exponents.json, estimation.csv (when an
/// estimate is used), trace.csv and manifest.json into config.output.
ScenarioResult run_scenario(const ExperimentConfig& config);

/// Config key addressed by a sweep axis: "section.key", a key that is unique across
/// sections, or "variant" (values "rule" or "rule:policy").
struct SweepAxis {
    std::string section;
    std::string key;
};
SweepAxis resolve_axis(const Json& doc, const std::string& axis);

struct SweepResult {
    std::filesystem::path output;
    std::vector<ScenarioResult> runs;
};

/// One run per value, each in <output>/<axis>=<value>, all sharing the master seed; writes a
/// merged errors.csv and index.csv in <output>.
SweepResult sweep(const Json& doc, const std::string& axis, const std::vector<Json>& values,
                  const std::filesystem::path& base_dir = {});

/// Runs a document: a plain scenario, or a sweep when it has a [sweep] table.
void run_document(const Json& doc, const std::filesystem::path& base_dir = {});

/// Git blob hash: sha1("blob <size>\0" + content), hex encoded.
std::string git_blob_hash(const std::string& content);

}  // namespace netdetect
