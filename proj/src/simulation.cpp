#include "netdetect/simulation.hpp"

#include "netdetect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace netdetect {

namespace {

// Observation sampler specialised to one hypothesis, with per-symbol lookup tables so the
// inner loop never evaluates logarithms for discrete nodes.
class CompiledModel {
public:
    CompiledModel(const NetworkModel& model, std::size_t theta) : model_(model), theta_(theta) {
        const std::size_t n = model.size();
        nodes_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& d = model.node(i, theta);
            auto& c = nodes_[i];
            c.discrete = d.is_discrete();
            if (!c.discrete) {
                c.mean = d.mean();
                c.sd = std::sqrt(d.variance());
                continue;
            }
            double cum = 0.0;
            for (std::size_t k = 0; k + 1 < d.probs().size(); ++k) {
                cum += d.probs()[k];
                c.cumulative.push_back(cum);
            }
            const std::size_t symbols = d.probs().size();
            c.loglik.assign(symbols, Vector(model.hypotheses()));
            for (std::size_t k = 0; k < symbols; ++k)
                for (std::size_t th = 0; th < model.hypotheses(); ++th)
                    c.loglik[k][th] = model.log_likelihood(i, th, static_cast<double>(k));
            if (model.hypotheses() == 2) {
                for (std::size_t k = 0; k < symbols; ++k) c.llr.push_back(model.llr(i, static_cast<double>(k)));
            }
        }
    }

    std::size_t size() const noexcept { return nodes_.size(); }

    /// Draws x_i and returns either the symbol index or the real observation.
    double draw(std::size_t i, Engine& rng, std::normal_distribution<double>& normal) const {
        const auto& c = nodes_[i];
        if (!c.discrete) return c.mean + c.sd * normal(rng);
        const double u = uniform01(rng);
        std::size_t k = 0;
        while (k < c.cumulative.size() && u >= c.cumulative[k]) ++k;
        return static_cast<double>(k);
    }

    double llr(std::size_t i, double x) const {
        const auto& c = nodes_[i];
        return c.discrete ? c.llr[static_cast<std::size_t>(x)] : model_.llr(i, x);
    }

    void log_likelihoods(std::size_t i, double x, Vector& out) const {
        const auto& c = nodes_[i];
        if (c.discrete) {
            out = c.loglik[static_cast<std::size_t>(x)];
            return;
        }
        out.resize(model_.hypotheses());
        for (std::size_t th = 0; th < out.size(); ++th) out[th] = model_.log_likelihood(i, th, x);
    }

    std::size_t theta() const noexcept { return theta_; }

private:
    struct Node {
        bool discrete = true;
        Vector cumulative;
        Vector llr;
        std::vector<Vector> loglik;  // [symbol][theta]
        double mean = 0.0, sd = 1.0;
    };

    const NetworkModel& model_;
    std::size_t theta_;
    std::vector<Node> nodes_;
};

// One worker's reusable state for running trials.
class TrialRunner {
public:
    TrialRunner(const SimulationSpec& spec, const NetworkModel& model, const WeightMatrix& w, const CompiledModel& cm)
        : spec_(spec), model_(model), w_(w), cm_(cm) {
        const std::size_t n = w.size();
        llrs_.resize(n);
        loglik_.assign(n, Vector(model.hypotheses()));
    }

    template <class OnRound>
    void run(std::uint64_t seed, OnRound&& on_round) {
        Engine rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t n = w_.size();

        state_ = spec_.rule == Rule::original ? LearningState::uniform_beliefs(n, model_.hypotheses())
                                               : LearningState::zeros(n);
        if (spec_.rule == Rule::combined) {
            if (spec_.initial_estimate.empty()) {
                std::uniform_real_distribution<double> start(0.5, 1.5);
                for (double& v : state_.pi_hat) v = start(rng);
            } else {
                state_.pi_hat = spec_.initial_estimate;
            }
            for (std::size_t s = 0; s < spec_.estimation_rounds; ++s)
                estimate_pi_step(state_.pi_hat, w_, spec_.quantizer, scratch_.b);
        }
        on_round(std::size_t{0}, state_);

        for (std::size_t t = 1; t <= spec_.horizon; ++t) {
            switch (spec_.rule) {
                case Rule::modified:
                    for (std::size_t i = 0; i < n; ++i) llrs_[i] = cm_.llr(i, cm_.draw(i, rng, normal));
                    step_modified(state_, w_, spec_.r, llrs_, spec_.quantizer, scratch_);
                    break;
                case Rule::combined:
                    for (std::size_t i = 0; i < n; ++i) llrs_[i] = cm_.llr(i, cm_.draw(i, rng, normal));
                    step_combined(state_, w_, llrs_, spec_.quantizer, scratch_);
                    break;
                case Rule::original:
                    for (std::size_t i = 0; i < n; ++i) cm_.log_likelihoods(i, cm_.draw(i, rng, normal), loglik_[i]);
                    step_original(state_, w_, spec_.r, loglik_, scratch_);
                    break;
                case Rule::estimation_only:
                    estimate_pi_step(state_.pi_hat, w_, spec_.quantizer, scratch_.b);
                    break;
            }
            on_round(t, state_);
        }
    }

    void run_recorded(std::uint64_t seed, std::span<double> out) {
        const std::size_t width = spec_.width(model_);
        std::size_t k = 0;
        run(seed, [&](std::size_t t, const LearningState& s) {
            if (k >= spec_.record_times.size() || spec_.record_times[k] != t) return;
            for (std::size_t m = 0; m < spec_.record_nodes.size(); ++m) {
                const std::size_t node = spec_.record_nodes[m];
                if (spec_.record == SimulationSpec::Record::ell) {
                    out[spec_.column(k, m, 0, 1)] = s.ell[node];
                } else {
                    for (std::size_t c = 0; c < width; ++c) out[spec_.column(k, m, c, width)] = s.log_beliefs[node][c];
                }
            }
            ++k;
        });
    }

private:
    const SimulationSpec& spec_;
    const NetworkModel& model_;
    const WeightMatrix& w_;
    const CompiledModel& cm_;
    LearningState state_;
    StepScratch scratch_;
    Vector llrs_;
    std::vector<Vector> loglik_;
};

}  // namespace

void SimulationSpec::validate(const NetworkModel& model, const WeightMatrix& w) const {
    const std::size_t n = w.size();
    if (model.size() != n) throw InvalidArgument("model has " + std::to_string(model.size()) + " nodes, network has " +
                                                 std::to_string(n));
    if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
    if (rule != Rule::original && rule != Rule::estimation_only) model.require_binary();
    if (rule == Rule::original || rule == Rule::modified) validate_geometric_weights(r, n);
    if (!initial_estimate.empty()) {
        if (initial_estimate.size() != n) throw InvalidArgument("initial estimate has the wrong length");
        for (double v : initial_estimate)
            if (!(v > 0.0)) throw InvalidArgument("initial estimates must be strictly positive");
    }
    if (quantizer.bits && *quantizer.bits < 1) throw InvalidArgument("quantizer needs at least one bit");
    if (record == Record::log_beliefs && rule != Rule::original) {
        throw InvalidArgument("log beliefs are only maintained by the original rule");
    }
    for (std::size_t k = 0; k < record_times.size(); ++k) {
        if (record_times[k] < 1 || record_times[k] > horizon) throw InvalidArgument("record time outside [1, horizon]");
        if (k > 0 && record_times[k] <= record_times[k - 1]) throw InvalidArgument("record times must be increasing");
    }
    for (std::size_t node : record_nodes)
        if (node >= n) throw InvalidArgument("record node " + std::to_string(node) + " out of range");
}

std::vector<std::size_t> default_sample_times(std::size_t horizon) {
    std::vector<std::size_t> times;
    for (std::size_t t = 1; t <= horizon; ++t)
        if (t <= 200 || t % 5 == 0) times.push_back(t);
    return times;
}

Vector SampleMatrix::column(std::size_t c) const {
    Vector out(trials);
    for (std::size_t t = 0; t < trials; ++t) out[t] = data[t * stride + c];
    return out;
}

void simulate_trials(const SimulationSpec& spec, const NetworkModel& model, const WeightMatrix& w,
                     std::size_t theta, std::uint64_t seed, std::uint64_t stream, std::size_t first,
                     std::size_t count, std::span<double> out, Execution exec) {
    spec.validate(model, w);
    if (theta >= model.hypotheses()) throw InvalidArgument("hypothesis index out of range");
    const std::size_t stride = spec.stride(model);
    if (out.size() < count * stride) throw InvalidArgument("output buffer too small");
    const CompiledModel cm(model, theta);

    if (exec == Execution::serial) {
        TrialRunner runner(spec, model, w, cm);
        for (std::size_t k = 0; k < count; ++k)
            runner.run_recorded(derive_seed(seed, stream, first + k), out.subspan(k * stride, stride));
        return;
    }

    const auto total = static_cast<long long>(count);
#pragma omp parallel
    {
        TrialRunner runner(spec, model, w, cm);
#pragma omp for schedule(dynamic, 64)
        for (long long k = 0; k < total; ++k) {
            const auto idx = static_cast<std::size_t>(k);
            runner.run_recorded(derive_seed(seed, stream, first + idx), out.subspan(idx * stride, stride));
        }
    }
}

SampleMatrix simulate(const SimulationSpec& spec, const NetworkModel& model, const WeightMatrix& w,
                      std::size_t theta, std::uint64_t seed, std::uint64_t stream, std::size_t trials,
                      Execution exec) {
    SampleMatrix m;
    m.trials = trials;
    m.stride = spec.stride(model);
    m.stream = stream;
    m.data.resize(trials * m.stride);
    simulate_trials(spec, model, w, theta, seed, stream, 0, trials, m.data, exec);
    return m;
}

RunTrace trace_run(const SimulationSpec& spec, const NetworkModel& model, const WeightMatrix& w,
                   std::size_t theta, std::uint64_t seed, std::uint64_t trial) {
    spec.validate(model, w);
    const CompiledModel cm(model, theta);
    TrialRunner runner(spec, model, w, cm);
    RunTrace trace{spec.rule, spec.horizon, seed, {}};
    trace.rounds.reserve(spec.horizon + 1);
    runner.run(derive_seed(seed, streams::trace, trial),
               [&](std::size_t, const LearningState& s) { trace.rounds.push_back(s); });
    return trace;
}

}  // namespace netdetect
