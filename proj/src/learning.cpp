#include "netdetect/learning.hpp"

#include "netdetect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netdetect {

namespace {

void require_length(std::size_t got, std::size_t n, const char* what) {
    if (got != n) {
        throw InvalidArgument(std::string(what) + " has length " + std::to_string(got) + ", expected " +
                              std::to_string(n));
    }
}

double log_normaliser(const Vector& v) {
    const double m = *std::max_element(v.begin(), v.end());
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

Vector llrs_of(const NetworkModel& model, std::span<const double> obs) {
    Vector out(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) out[i] = model.llr(i, obs[i]);
    return out;
}

// ell_i = W_ii mu_i + sum_{j != i} W_ij Q(mu_j)
void consensus(const WeightMatrix& w, std::span<const double> mu, const QuantizerConfig& q, std::span<double> out) {
    if (!q.active()) {
        w.right_multiply(mu, out);
        return;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        double acc = 0.0;
        for (const auto& e : w.row(i)) acc += e.weight * (e.col == i ? mu[e.col] : q.apply(mu[e.col]));
        out[i] = acc;
    }
}

}  // namespace

double quantize(double x, int bits) {
    if (bits < 1) throw InvalidArgument("quantizer needs at least one significand bit");
    if (x == 0.0 || !std::isfinite(x)) return x;
    int exponent = 0;
    const double mantissa = std::frexp(std::abs(x), &exponent);  // |x| = mantissa * 2^exponent, mantissa in [0.5, 1)
    const double kept = std::floor(std::ldexp(mantissa, bits));
    return std::copysign(std::ldexp(kept, exponent - bits), x);
}

void validate_geometric_weights(std::span<const double> r, std::size_t n) {
    require_length(r.size(), n, "geometric weight vector");
    for (std::size_t i = 0; i < n; ++i)
        if (!(r[i] > 0.0) || !std::isfinite(r[i])) {
            throw InvalidArgument("geometric weight r_" + std::to_string(i) + " must be finite and positive");
        }
}

Vector inverse_weights(std::span<const double> pi, double c) {
    Vector r(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (!(pi[i] > 0.0)) throw InvalidArgument("cannot invert a zero stationary mass");
        r[i] = c / pi[i];
    }
    return r;
}

LearningState LearningState::zeros(std::size_t n) {
    LearningState s;
    s.ell.assign(n, 0.0);
    s.mu.assign(n, 0.0);
    s.pi_hat.assign(n, 1.0);
    return s;
}

LearningState LearningState::uniform_beliefs(std::size_t n, std::size_t hypotheses) {
    LearningState s = zeros(n);
    s.log_beliefs.assign(n, Vector(hypotheses, -std::log(static_cast<double>(hypotheses))));
    return s;
}

void step_modified(LearningState& s, const WeightMatrix& w, std::span<const double> r,
                   std::span<const double> llrs, const QuantizerConfig& q, StepScratch&) {
    const std::size_t n = w.size();
    require_length(s.size(), n, "state");
    require_length(r.size(), n, "geometric weight vector");
    require_length(llrs.size(), n, "observation vector");
    for (std::size_t i = 0; i < n; ++i) s.mu[i] = s.ell[i] + r[i] * llrs[i];
    consensus(w, s.mu, q, s.ell);
}

void step_modified(LearningState& s, const WeightMatrix& w, std::span<const double> r,
                   std::span<const double> obs, const NetworkModel& model, const QuantizerConfig& q) {
    require_length(obs.size(), w.size(), "observation vector");
    StepScratch scratch;
    step_modified(s, w, r, llrs_of(model, obs), q, scratch);
}

void step_original(LearningState& s, const WeightMatrix& w, std::span<const double> r,
                   const std::vector<Vector>& log_likelihoods, StepScratch& scratch) {
    const std::size_t n = w.size();
    require_length(s.log_beliefs.size(), n, "belief table");
    require_length(log_likelihoods.size(), n, "likelihood table");
    require_length(r.size(), n, "geometric weight vector");
    const std::size_t m = s.log_beliefs.front().size();

    auto& post = scratch.log_posterior;
    post.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        require_length(log_likelihoods[i].size(), m, "likelihood row");
        post[i].resize(m);
        for (std::size_t th = 0; th < m; ++th) post[i][th] = s.log_beliefs[i][th] + r[i] * log_likelihoods[i][th];
        const double z = log_normaliser(post[i]);
        for (double& v : post[i]) v -= z;
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& q = s.log_beliefs[i];
        std::fill(q.begin(), q.end(), 0.0);
        for (const auto& e : w.row(i))
            for (std::size_t th = 0; th < m; ++th) q[th] += e.weight * post[e.col][th];
        const double z = log_normaliser(q);
        for (double& v : q) v -= z;
    }
    if (m == 2) {
        for (std::size_t i = 0; i < n; ++i) {
            s.mu[i] = post[i][1] - post[i][0];
            s.ell[i] = s.log_beliefs[i][1] - s.log_beliefs[i][0];
        }
    }
}

void step_original(LearningState& s, const WeightMatrix& w, std::span<const double> obs, const NetworkModel& model) {
    const std::size_t n = w.size();
    require_length(obs.size(), n, "observation vector");
    std::vector<Vector> ll(n, Vector(model.hypotheses()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t th = 0; th < model.hypotheses(); ++th) ll[i][th] = model.log_likelihood(i, th, obs[i]);
    StepScratch scratch;
    const Vector ones(n, 1.0);
    step_original(s, w, ones, ll, scratch);
}

void estimate_pi_step(Vector& pi_hat, const WeightMatrix& w, const QuantizerConfig& q, Vector& scratch) {
    const std::size_t n = w.size();
    require_length(pi_hat.size(), n, "estimate vector");
    scratch.assign(n, 0.0);
    if (!q.active() || !q.quantize_estimates) {
        w.left_multiply(pi_hat, scratch);
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& e : w.row(i)) {
                const double share = e.weight * pi_hat[i];
                scratch[e.col] += e.col == i ? share : q.apply(share);
            }
    }
    pi_hat.swap(scratch);
}

void estimate_pi_step(LearningState& s, const WeightMatrix& w) {
    Vector scratch;
    estimate_pi_step(s.pi_hat, w, QuantizerConfig{}, scratch);
}

void step_combined(LearningState& s, const WeightMatrix& w, std::span<const double> llrs,
                   const QuantizerConfig& q, StepScratch& scratch) {
    const std::size_t n = w.size();
    require_length(s.size(), n, "state");
    require_length(llrs.size(), n, "observation vector");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(s.pi_hat[i] > 0.0)) {
            throw InvalidArgument("stationary estimate of node " + std::to_string(i) + " is not positive");
        }
        s.mu[i] = s.ell[i] + llrs[i] / s.pi_hat[i];
    }
    consensus(w, s.mu, q, s.ell);
    estimate_pi_step(s.pi_hat, w, q, scratch.a);
}

void step_combined(LearningState& s, const WeightMatrix& w, std::span<const double> obs,
                   const NetworkModel& model, const QuantizerConfig& q) {
    require_length(obs.size(), w.size(), "observation vector");
    StepScratch scratch;
    step_combined(s, w, llrs_of(model, obs), q, scratch);
}

Vector initial_estimate(std::size_t n, std::uint64_t seed) {
    Engine rng(seed);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    Vector v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

EstimationRun run_estimation(const Network& net, std::size_t rounds, std::uint64_t seed) {
    return run_estimation(net, rounds, initial_estimate(net.size(), seed));
}

EstimationRun run_estimation(const Network& net, std::size_t rounds, Vector initial) {
    net.require_ergodic();
    const std::size_t n = net.size();
    require_length(initial.size(), n, "initial estimate");
    for (double v : initial)
        if (!(v > 0.0)) throw InvalidArgument("initial estimates must be strictly positive");

    EstimationRun run;
    run.mass = std::accumulate(initial.begin(), initial.end(), 0.0);
    run.initial = initial;
    run.pi_hat = std::move(initial);
    const auto& pi = net.profile.pi;
    auto error = [&] {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += std::abs(run.pi_hat[i] - run.mass * pi[i]);
        return acc;
    };
    run.error_trace.reserve(rounds + 1);
    run.error_trace.push_back(error());
    Vector scratch;
    const QuantizerConfig exact;
    for (std::size_t t = 0; t < rounds; ++t) {
        estimate_pi_step(run.pi_hat, net.weights, exact, scratch);
        run.error_trace.push_back(error());
    }
    return run;
}

double estimation_error_bound(const Network& net, std::span<const double> initial, std::size_t rounds,
                              DeviationFactor factor) {
    net.require_reversible();
    require_length(initial.size(), net.size(), "initial estimate");
    double acc = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i)
        acc += initial[i] * std::sqrt(deviation_factor(net.profile.pi[i], factor));
    return acc * std::pow(net.profile.rho, static_cast<double>(rounds));
}

double estimation_error_bound_closed_form(const Network& net, std::span<const double> initial, std::size_t rounds,
                                          DeviationFactor factor) {
    net.require_reversible();
    require_length(initial.size(), net.size(), "initial estimate");
    double roots = 0.0, energy = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i) {
        roots += std::sqrt(deviation_factor(net.profile.pi[i], factor));
        energy += net.profile.pi[i] * initial[i] * initial[i];
    }
    return roots * energy * std::pow(net.profile.rho, static_cast<double>(rounds));
}

std::string to_string(Rule rule) {
    switch (rule) {
        case Rule::original: return "original";
        case Rule::modified: return "modified";
        case Rule::combined: return "combined";
        case Rule::estimation_only: return "estimation-only";
    }
    return "unknown";
}

Rule parse_rule(const std::string& name) {
    if (name == "original") return Rule::original;
    if (name == "modified") return Rule::modified;
    if (name == "combined") return Rule::combined;
    if (name == "estimation-only" || name == "estimation_only") return Rule::estimation_only;
    throw InvalidArgument("unknown rule '" + name + "'");
}

}  // namespace netdetect
