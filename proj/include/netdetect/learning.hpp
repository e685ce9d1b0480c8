#pragma once

// Iterative network protocols: the belief-consensus rule, the log-belief rule with
// geometric weights, decentralized estimation of the stationary distribution, the
// combined estimate-while-learn rule and the message quantizer.

#include "netdetect/graph_markov.hpp"
#include "netdetect/hypothesis_model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace netdetect {

/// Keeps the first `bits` binary digits of |x| starting at the leading one, truncating
/// toward zero. Q(0) = 0, sign preserved.
double quantize(double x, int bits);

struct QuantizerConfig {
    std::optional<int> bits;        ///< empty: exact messages
    bool quantize_estimates = true; ///< also quantize pi-hat messages in the combined rule

    double apply(double x) const { return bits ? quantize(x, *bits) : x; }
    bool active() const noexcept { return bits.has_value(); }
};

/// Throws unless every weight is finite and strictly positive.
void validate_geometric_weights(std::span<const double> r, std::size_t n);

/// Weights 1/pi_i scaled by c.
Vector inverse_weights(std::span<const double> pi, double c = 1.0);

/// Network-wide protocol state, one entry per node.
struct LearningState {
    Vector ell;      ///< private log-belief ratio
    Vector mu;       ///< public log-belief ratio
    Vector pi_hat;   ///< stationary estimate
    /// Original rule only: log q_i(theta), normalised per node.
    std::vector<Vector> log_beliefs;

    static LearningState zeros(std::size_t n);
    /// Uniform prior over `hypotheses` for the belief-consensus rule.
    static LearningState uniform_beliefs(std::size_t n, std::size_t hypotheses);
    std::size_t size() const noexcept { return ell.size(); }
};

/// Reusable buffers for the step functions; avoids allocation inside Monte Carlo loops.
struct StepScratch {
    Vector a, b;
    std::vector<Vector> log_posterior;
};

/// mu_i = ell_i + r_i llr_i; ell_i = W_ii mu_i + sum_{j != i} W_ij Q(mu_j).
void step_modified(LearningState& s, const WeightMatrix& w, std::span<const double> r,
                   std::span<const double> llrs, const QuantizerConfig& q, StepScratch& scratch);
void step_modified(LearningState& s, const WeightMatrix& w, std::span<const double> r,
                   std::span<const double> obs, const NetworkModel& model, const QuantizerConfig& q);

/// Belief consensus in log space. log_likelihoods[i][theta] = log P_{i,theta}(x_i); the
/// local likelihood is raised to r_i (all ones gives the classical rule). For binary
/// models ell and mu are refreshed with the resulting log-belief ratios.
void step_original(LearningState& s, const WeightMatrix& w, std::span<const double> r,
                   const std::vector<Vector>& log_likelihoods, StepScratch& scratch);
void step_original(LearningState& s, const WeightMatrix& w, std::span<const double> obs, const NetworkModel& model);

/// pi_hat <- pi_hat W. With an active quantizer the shares W_ij pi_hat_i sent to other
/// nodes are quantized; a node's own share is exact.
void estimate_pi_step(Vector& pi_hat, const WeightMatrix& w, const QuantizerConfig& q, Vector& scratch);
void estimate_pi_step(LearningState& s, const WeightMatrix& w);

/// mu_i = ell_i + llr_i / pi_hat_i; then ell = W mu and pi_hat = pi_hat W from pre-step values.
void step_combined(LearningState& s, const WeightMatrix& w, std::span<const double> llrs,
                   const QuantizerConfig& q, StepScratch& scratch);
void step_combined(LearningState& s, const WeightMatrix& w, std::span<const double> obs,
                   const NetworkModel& model, const QuantizerConfig& q);

/// Positive random start for the estimator, uniform on (0.5, 1.5).
Vector initial_estimate(std::size_t n, std::uint64_t seed);

struct EstimationRun {
    Vector initial;
    Vector pi_hat;
    double mass;        ///< s = sum of the initial values
    Vector error_trace; ///< ||pi_hat^(t) - s pi||_1 for t = 0..rounds
};

/// Requires an ergodic chain.
EstimationRun run_estimation(const Network& net, std::size_t rounds, std::uint64_t seed);
EstimationRun run_estimation(const Network& net, std::size_t rounds, Vector initial);

/// Bound on ||pi_hat^(T) - s pi||_1 obtained from the mixing lemma:
/// sum_i pi_hat_i^(0) sqrt(factor_i) rho^T.
double estimation_error_bound(const Network& net, std::span<const double> initial, std::size_t rounds,
                              DeviationFactor factor = DeviationFactor::classical);
/// The closed form (sum_i sqrt(factor_i)) (sum_i pi_i pi_hat_i^(0)^2) rho^T.
double estimation_error_bound_closed_form(const Network& net, std::span<const double> initial, std::size_t rounds,
                                          DeviationFactor factor = DeviationFactor::classical);

enum class Rule { original, modified, combined, estimation_only };

std::string to_string(Rule rule);
Rule parse_rule(const std::string& name);

/// Per-round snapshot of every node.
struct RunTrace {
    Rule rule;
    std::size_t horizon;
    std::uint64_t seed;
    std::vector<LearningState> rounds;  ///< horizon + 1 entries, round 0 first
};

}  // namespace netdetect
