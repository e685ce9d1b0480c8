#pragma once

// Error exponents and the higher-order decentralization constants. Constants are returned
// as log-domain terms (the exponent of the multiplicative penalty) and are never
// exponentiated here. Vanishing o(1) terms are dropped.

#include "netdetect/graph_markov.hpp"
#include "netdetect/hypothesis_model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace netdetect {

/// sum_j [lambda a_j D(P_{j,0}||P_{j,1}) - log E_{P_{j,1}}[(P_{j,0}/P_{j,1})^(lambda a_j)]]
/// with a_j = pi_j r_j. Concave in lambda.
double general_exponent_objective(const NetworkModel& model, std::span<const double> pi,
                                  std::span<const double> r, double lambda);

struct GeneralExponent {
    double value;
    double lambda_star;
};

/// Type-II exponent of the log-belief rule with geometric weights r. The search interval
/// for lambda doubles until the objective stops increasing, then Brent's method refines.
GeneralExponent exponent_general(const NetworkModel& model, const Network& net, std::span<const double> r);

/// sum_j D(P_{j,0} || P_{j,1}).
double exponent_optimal(const NetworkModel& model);

/// Chernoff information of the product model.
ChernoffResult exponent_bayes(const NetworkModel& model);

/// Log of the Neyman-Pearson penalty:
/// rho/(1-rho) sqrt(factor_i) (sqrt(sum_j D_j^2/pi_j) + sqrt(sum_j L_j^2/pi_j)).
double cnp_constant(const NetworkModel& model, const Network& net, std::size_t i,
                    DeviationFactor factor = DeviationFactor::classical);

/// Log of the Bayes-risk penalty:
/// max(theta*, 1-theta*) rho/(1-rho) sqrt(factor_i sum_j L_j^2/pi_j).
double cb_constant(const NetworkModel& model, const Network& net, std::size_t i,
                   DeviationFactor factor = DeviationFactor::classical);

/// Rounds of delay equivalent to the NP penalty: cnp / sum KL.
double delay(const NetworkModel& model, const Network& net, std::size_t i,
             DeviationFactor factor = DeviationFactor::classical);

/// Log-penalty for the symmetric gaussian model:
/// (2 mu/sigma) rho^2/(1-rho^2) factor_i sum_j 1/pi_j.
double gaussian_bound_constant(const NetworkModel& model, const Network& net, std::size_t i,
                               DeviationFactor factor = DeviationFactor::classical);

/// sum KL / T for a chain of period T.
double periodic_exponent(const NetworkModel& model, std::size_t period);

/// Per-round moments of the summed log-likelihood ratio under H0.
struct LlrMoments {
    double mean;      ///< -sum KL
    double variance;  ///< S^2
    double third;     ///< third central moment
};

LlrMoments llr_moments(const NetworkModel& model);

/// log beta_cen(t) = H t + lambda S sqrt(t) - log(t)/2 - log(2 pi)/2 - log S - phi(lambda) - lambda^2/2,
/// lambda = Phi^{-1}(1 - epsilon), phi(x) = third (1 - x^2) / (6 S^2).
double strassen_centralized_log_beta(const NetworkModel& model, std::size_t t, double epsilon);
double strassen_centralized_beta(const NetworkModel& model, std::size_t t, double epsilon);

struct ExponentFit {
    double slope;
    double intercept;
    double r_squared;
    double slope_stderr;
    std::size_t points;
};

/// Least-squares slope of -log p against t over the last `window` usable points. A point
/// is usable when p > 0 and, if given, its success count p * trials reaches min_count.
ExponentFit empirical_exponent(std::span<const double> times, std::span<const double> probabilities,
                               std::size_t window, std::size_t trials = 0, double min_count = 0.0);

struct ExponentReport {
    std::optional<double> general;      ///< empty for reducible or periodic chains
    std::optional<double> lambda_star;
    double optimal;
    double bayes;
    double theta_star;
    std::size_t period;
    std::optional<double> periodic;     ///< set when the chain is periodic
    std::vector<std::optional<double>> cnp;     ///< empty entries when assumptions fail
    std::vector<std::optional<double>> cb;
    std::vector<std::optional<double>> delay;
    std::vector<std::optional<double>> gaussian_bound;
    DeviationFactor factor;
};

/// Everything computable for (model, network, r); inapplicable constants stay empty.
ExponentReport exponent_report(const NetworkModel& model, const Network& net, std::span<const double> r,
                               DeviationFactor factor = DeviationFactor::classical);

}  // namespace netdetect
