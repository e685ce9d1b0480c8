#pragma once

// Monte Carlo trial kernels. Each trial runs one learning protocol from round 0 to the
// horizon under a fixed hypothesis and records the chosen statistic at selected rounds.
// The serial kernel is the reference; the OpenMP kernel must reproduce it bit for bit.

#include "netdetect/graph_markov.hpp"
#include "netdetect/hypothesis_model.hpp"
#include "netdetect/learning.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace netdetect {

enum class Execution { serial, parallel };

/// Independent random streams derived from one master seed.
namespace streams {
inline constexpr std::uint64_t calibration = 1;
inline constexpr std::uint64_t null_evaluation = 2;
inline constexpr std::uint64_t alternative = 3;
inline constexpr std::uint64_t estimation = 4;
inline constexpr std::uint64_t trace = 5;
/// Per-hypothesis streams for M-ary runs.
constexpr std::uint64_t hypothesis(std::size_t theta, bool calibrating) {
    return 100 + 2 * static_cast<std::uint64_t>(theta) + (calibrating ? 0 : 1);
}
}  // namespace streams

struct SimulationSpec {
    enum class Record { ell, log_beliefs };

    Rule rule = Rule::modified;
    Vector r;                      ///< geometric weights (original / modified rules)
    QuantizerConfig quantizer;
    std::size_t estimation_rounds = 0;  ///< combined rule: estimation rounds before observing
    Vector initial_estimate;       ///< combined rule start; empty draws one per trial
    std::size_t horizon = 1;
    std::vector<std::size_t> record_times;  ///< ascending, each in [1, horizon]
    std::vector<std::size_t> record_nodes;
    Record record = Record::ell;

    /// Values per (time, node) cell: 1 for ell, M for log beliefs.
    std::size_t width(const NetworkModel& model) const {
        return record == Record::ell ? 1 : model.hypotheses();
    }
    std::size_t stride(const NetworkModel& model) const {
        return record_times.size() * record_nodes.size() * width(model);
    }
    /// Column of (time index k, node index m, component c) inside a trial row.
    std::size_t column(std::size_t k, std::size_t m, std::size_t c, std::size_t w) const {
        return (k * record_nodes.size() + m) * w + c;
    }

    /// Throws InvalidArgument describing the first inconsistency.
    void validate(const NetworkModel& model, const WeightMatrix& w) const;
};

/// Every round up to 200, every fifth round after that.
std::vector<std::size_t> default_sample_times(std::size_t horizon);

/// Trial-major table of recorded statistics.
struct SampleMatrix {
    std::size_t trials = 0;
    std::size_t stride = 0;
    std::uint64_t stream = 0;
    std::vector<double> data;

    std::span<const double> row(std::size_t t) const { return {data.data() + t * stride, stride}; }
    Vector column(std::size_t c) const;
};

/// Runs trials [first, first + count) into out (count * stride values).
void simulate_trials(const SimulationSpec& spec, const NetworkModel& model, const WeightMatrix& w,
                     std::size_t theta, std::uint64_t seed, std::uint64_t stream, std::size_t first,
                     std::size_t count, std::span<double> out, Execution exec);

SampleMatrix simulate(const SimulationSpec& spec, const NetworkModel& model, const WeightMatrix& w,
                      std::size_t theta, std::uint64_t seed, std::uint64_t stream, std::size_t trials,
                      Execution exec);

/// Calls visit(block) for consecutive blocks of at most block_size trials, so evaluation
/// streams can be reduced without holding every trial in memory.
template <class Visit>
void for_each_block(const SimulationSpec& spec, const NetworkModel& model, const WeightMatrix& w,
                    std::size_t theta, std::uint64_t seed, std::uint64_t stream, std::size_t trials,
                    Execution exec, std::size_t block_size, Visit&& visit) {
    SampleMatrix block;
    block.stride = spec.stride(model);
    block.stream = stream;
    for (std::size_t first = 0; first < trials; first += block_size) {
        block.trials = std::min(block_size, trials - first);
        block.data.resize(block.trials * block.stride);
        simulate_trials(spec, model, w, theta, seed, stream, first, block.trials, block.data, exec);
        visit(static_cast<const SampleMatrix&>(block));
    }
}

/// Full per-round state of one trial, round 0 included.
RunTrace trace_run(const SimulationSpec& spec, const NetworkModel& model, const WeightMatrix& w,
                   std::size_t theta, std::uint64_t seed, std::uint64_t trial);

}  // namespace netdetect
