#include "netdetect/detection.hpp"

#include "netdetect/errors.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace netdetect {

namespace {

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0,1)");
}

GaussianNp gaussian_test(double mean, double stddev, double epsilon) {
    const double lambda = detail::normal_tail_quantile(epsilon);
    const double z = 2.0 * mean / stddev - lambda;
    const double log_beta = detail::log_normal_tail(z);
    return {-mean + stddev * lambda, std::exp(log_beta), log_beta, mean, stddev};
}

// Per-cell tallies relative to a threshold: strictly above and exactly equal.
struct Tally {
    std::size_t above = 0;
    std::size_t equal = 0;

    void add(double v, double gamma) {
        if (v > gamma) ++above;
        else if (v == gamma) ++equal;
    }
    double rate(double eta, std::size_t n) const {
        return (static_cast<double>(above) + eta * static_cast<double>(equal)) / static_cast<double>(n);
    }
    /// Rate of deciding 0, counted directly so small values keep full precision.
    double complement_rate(double eta, std::size_t n) const {
        const double below = static_cast<double>(n - above - equal);
        return (below + (1.0 - eta) * static_cast<double>(equal)) / static_cast<double>(n);
    }
};

}  // namespace

int decide(double ell, const TestSpec& spec, double u) {
    if (ell > spec.gamma) return 1;
    if (ell == spec.gamma) return u < spec.eta ? 1 : 0;
    return 0;
}

double decision_rate(const TestSpec& spec, std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("empty sample");
    Tally tally;
    for (double v : values) tally.add(v, spec.gamma);
    return tally.rate(spec.eta, values.size());
}

double np_threshold_analytic(const NetworkModel& model, const Network& net, std::span<const double> r,
                             std::size_t t, double delta) {
    model.require_binary();
    if (!net.profile.irreducible) net.require_ergodic();
    if (!(delta > 0.0)) throw InvalidArgument("slack delta must be positive");
    if (r.size() != model.size() || net.size() != model.size()) throw InvalidArgument("dimension mismatch");
    double drift = 0.0;
    for (std::size_t j = 0; j < model.size(); ++j) drift -= net.profile.pi[j] * r[j] * kl(model, j, 0, 1);
    return static_cast<double>(t) * (drift + delta);
}

double CalibratedTest::rate(std::span<const double> values, std::uint64_t stream) const {
    if (stream == calibration_stream) {
        throw InvalidArgument("evaluation sample comes from the calibration stream; use a disjoint sample");
    }
    return decision_rate(spec, values);
}

CalibratedTest np_threshold_empirical(std::span<const double> h0_values, std::uint64_t stream, double epsilon) {
    require_epsilon(epsilon);
    const std::size_t n = h0_values.size();
    if (n < kMinCalibrationTrials) {
        throw InvalidArgument("NP calibration needs at least " + std::to_string(kMinCalibrationTrials) +
                              " H0 trials, got " + std::to_string(n));
    }
    Vector sorted(h0_values.begin(), h0_values.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double target = epsilon * static_cast<double>(n);
    std::size_t above = 0;
    for (std::size_t k = 0; k < n;) {
        std::size_t end = k;
        while (end < n && sorted[end] == sorted[k]) ++end;
        const double equal = static_cast<double>(end - k);
        if (static_cast<double>(above) < target && target <= static_cast<double>(above) + equal) {
            const double eta = (target - static_cast<double>(above)) / equal;
            return {{sorted[k], std::clamp(eta, 0.0, 1.0)}, epsilon, stream};
        }
        above = end;
        k = end;
    }
    return {{sorted.back(), 1.0}, epsilon, stream};
}

GaussianNp gaussian_np_exact(const NetworkModel& model, const Network& net, std::size_t t, std::size_t node,
                             double epsilon, std::span<const double> r) {
    if (!model.is_symmetric_gaussian()) throw InvalidArgument("exact NP test requires a symmetric gaussian model");
    require_epsilon(epsilon);
    const std::size_t n = net.size();
    if (model.size() != n) throw InvalidArgument("model and network sizes differ");
    if (node >= n) throw InvalidArgument("node index out of range");
    if (t < 1) throw InvalidArgument("horizon must be at least 1");
    Vector weights;
    if (r.empty()) {
        if (!net.profile.irreducible) net.require_ergodic();
        weights = inverse_weights(net.profile.pi);
        r = weights;
    } else if (r.size() != n) {
        throw InvalidArgument("geometric weight vector has the wrong length");
    }

    const double m = model.node(0, 1).mean();
    const double var = model.node(0, 1).variance();
    // llr = (2 m / var) x has mean -+2 m^2 / var and variance 4 m^2 / var.
    const double llr_mean = 2.0 * m * m / var;
    const double llr_var = 4.0 * m * m / var;

    Vector row(n, 0.0), next(n);
    row[node] = 1.0;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t tau = 1; tau <= t; ++tau) {
        net.weights.left_multiply(row, next);
        row.swap(next);
        for (std::size_t j = 0; j < n; ++j) {
            const double a = row[j] * r[j];
            sum += a;
            sum_sq += a * a;
        }
    }
    return gaussian_test(sum * llr_mean, std::sqrt(sum_sq * llr_var), epsilon);
}

GaussianNp gaussian_np_centralized(const NetworkModel& model, std::size_t t, double epsilon) {
    if (!model.is_symmetric_gaussian()) throw InvalidArgument("exact NP test requires a symmetric gaussian model");
    require_epsilon(epsilon);
    const double m = model.node(0, 1).mean();
    const double var = model.node(0, 1).variance();
    const double count = static_cast<double>(model.size() * t);
    return gaussian_test(count * 2.0 * m * m / var, std::sqrt(count * 4.0 * m * m / var), epsilon);
}

double bayes_threshold(double xi0, double xi1) {
    if (!(xi0 > 0.0 && xi1 > 0.0) || std::abs(xi0 + xi1 - 1.0) > 1e-12) {
        throw InvalidArgument("prior must be positive and sum to 1");
    }
    return std::log(xi0 / xi1);
}

int bayes_decide(double ell, double xi0, double xi1) { return ell >= bayes_threshold(xi0, xi1) ? 1 : 0; }

std::optional<std::size_t> mary_decide_with_rejection(std::span<const double> log_beliefs,
                                                      const std::vector<Vector>& thresholds) {
    const std::size_t m = log_beliefs.size();
    if (m < 2) throw InvalidArgument("M-ary decision needs at least two hypotheses");
    if (thresholds.size() != m) throw InvalidArgument("threshold matrix must be M x M");
    for (std::size_t k = 0; k < m; ++k) {
        if (thresholds[k].size() != m) throw InvalidArgument("threshold matrix must be M x M");
        bool passes = true;
        for (std::size_t l = 0; l < m && passes; ++l)
            if (l != k && log_beliefs[k] - log_beliefs[l] < thresholds[k][l]) passes = false;
        if (passes) return k;
    }
    return std::nullopt;
}

double binomial_stderr(double p, std::size_t trials) {
    if (trials == 0) return 0.0;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(trials));
}

std::vector<ErrorCurve> monte_carlo_errors(const NetworkModel& model, const Network& net,
                                           const MonteCarloConfig& config) {
    const auto& spec = config.simulation;
    spec.validate(model, net.weights);
    if (spec.record != SimulationSpec::Record::ell) throw InvalidArgument("error curves need the ell statistic");
    if (config.trials < 1) throw InvalidArgument("trials must be at least 1");
    model.require_binary();

    const std::size_t times = spec.record_times.size();
    const std::size_t nodes = spec.record_nodes.size();
    const std::size_t cells = times * nodes;
    const auto& test = config.test;
    const double xi0 = test.xi0, xi1 = test.xi1;
    bayes_threshold(xi0, xi1);

    std::vector<TestSpec> thresholds(cells);
    if (test.kind == DecisionTest::Kind::neyman_pearson) {
        const SampleMatrix cal = simulate(spec, model, net.weights, 0, config.seed, streams::calibration,
                                          config.trials, config.execution);
        for (std::size_t c = 0; c < cells; ++c)
            thresholds[c] = np_threshold_empirical(cal.column(c), cal.stream, test.epsilon).spec;
    } else {
        const double gamma = bayes_threshold(xi0, xi1);
        // ell >= gamma decides 1, i.e. ties go to 1.
        std::fill(thresholds.begin(), thresholds.end(), TestSpec{gamma, 1.0});
    }

    auto tally = [&](std::size_t theta, std::uint64_t stream) {
        std::vector<Tally> tallies(cells);
        for_each_block(spec, model, net.weights, theta, config.seed, stream, config.trials, config.execution,
                       config.block_size, [&](const SampleMatrix& block) {
                           for (std::size_t t = 0; t < block.trials; ++t) {
                               const auto row = block.row(t);
                               for (std::size_t c = 0; c < cells; ++c) tallies[c].add(row[c], thresholds[c].gamma);
                           }
                       });
        return tallies;
    };
    const auto null_tally = tally(0, streams::null_evaluation);
    const auto alt_tally = tally(1, streams::alternative);

    std::vector<ErrorCurve> curves(nodes);
    for (std::size_t m = 0; m < nodes; ++m) {
        curves[m].node = spec.record_nodes[m];
        for (std::size_t k = 0; k < times; ++k) {
            const std::size_t c = spec.column(k, m, 0, 1);
            ErrorEstimate e;
            e.t = spec.record_times[k];
            e.trials = config.trials;
            e.threshold = thresholds[c];
            e.alpha = null_tally[c].rate(thresholds[c].eta, config.trials);
            e.beta = alt_tally[c].complement_rate(thresholds[c].eta, config.trials);
            e.bayes_risk = xi0 * e.alpha + xi1 * e.beta;
            e.stderr_alpha = binomial_stderr(e.alpha, config.trials);
            e.stderr_beta = binomial_stderr(e.beta, config.trials);
            curves[m].points.push_back(e);
        }
    }
    return curves;
}

}  // namespace netdetect
