#pragma once

// Decisions on log-belief ratios: randomized threshold tests, Neyman-Pearson thresholds
// (analytic, empirical, exact gaussian), Bayes decisions, M-ary decisions with rejection
// and Monte Carlo error estimation.

#include "netdetect/graph_markov.hpp"
#include "netdetect/hypothesis_model.hpp"
#include "netdetect/simulation.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace netdetect {

struct TestSpec {
    double gamma = 0.0;
    double eta = 1.0;  ///< probability of deciding 1 when ell == gamma exactly
};

/// 1 if ell > gamma, Ber(eta) via u < eta if ell == gamma, else 0.
int decide(double ell, const TestSpec& spec, double u);

/// Mean decision rate of the randomized test over a sample: (#{> gamma} + eta #{== gamma}) / N.
double decision_rate(const TestSpec& spec, std::span<const double> values);

/// t (sum_j pi_j r_j E_{P_{j,0}}[llr_j] + delta).
double np_threshold_analytic(const NetworkModel& model, const Network& net, std::span<const double> r,
                             std::size_t t, double delta);

inline constexpr std::size_t kMinCalibrationTrials = 1000;

/// A test calibrated on one random stream; evaluation on the same stream is refused.
struct CalibratedTest {
    TestSpec spec;
    double epsilon;
    std::uint64_t calibration_stream;

    /// Decision rate on an evaluation sample drawn from another stream.
    double rate(std::span<const double> values, std::uint64_t stream) const;
};

/// gamma is the empirical (1 - epsilon) quantile of the H0 sample and eta is chosen so the
/// calibration sample's rejection rate is exactly epsilon.
CalibratedTest np_threshold_empirical(std::span<const double> h0_values, std::uint64_t stream, double epsilon);

struct GaussianNp {
    double gamma;
    double beta;
    double log_beta;  ///< accurate even when beta underflows
    double mean;      ///< ell ~ N(-mean, stddev^2) under H0 and N(+mean, stddev^2) under H1
    double stddev;
};

/// Exact NP test for the symmetric gaussian model: ell_i(t) is a linear combination of
/// gaussian observations with coefficients [W^tau]_ij r_j. r defaults to 1/pi.
GaussianNp gaussian_np_exact(const NetworkModel& model, const Network& net, std::size_t t, std::size_t node,
                             double epsilon, std::span<const double> r = {});

/// Same test for the centralized statistic: the plain sum of all n t log-likelihood ratios.
GaussianNp gaussian_np_centralized(const NetworkModel& model, std::size_t t, double epsilon);

double bayes_threshold(double xi0, double xi1);

/// 1 iff ell >= log(xi0 / xi1).
int bayes_decide(double ell, double xi0, double xi1);

/// Lowest k with log_beliefs[k] - log_beliefs[l] >= thresholds[k][l] for every l != k;
/// nullopt means reject.
std::optional<std::size_t> mary_decide_with_rejection(std::span<const double> log_beliefs,
                                                      const std::vector<Vector>& thresholds);

struct ErrorEstimate {
    std::size_t t = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double bayes_risk = 0.0;
    double stderr_alpha = 0.0;
    double stderr_beta = 0.0;
    std::size_t trials = 0;
    TestSpec threshold;
};

double binomial_stderr(double p, std::size_t trials);

struct DecisionTest {
    enum class Kind { neyman_pearson, bayes };
    Kind kind = Kind::neyman_pearson;
    double epsilon = 0.05;
    double xi0 = 0.5;
    double xi1 = 0.5;

    static DecisionTest neyman_pearson(double epsilon) { return {Kind::neyman_pearson, epsilon, 0.5, 0.5}; }
    static DecisionTest bayes(double xi0, double xi1) { return {Kind::bayes, 0.05, xi0, xi1}; }
};

struct MonteCarloConfig {
    SimulationSpec simulation;
    DecisionTest test;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    Execution execution = Execution::parallel;
    std::size_t block_size = 8192;
};

struct ErrorCurve {
    std::size_t node;
    std::vector<ErrorEstimate> points;  ///< one per record time
};

/// NP tests calibrate on a dedicated H0 stream and estimate alpha and beta on two further
/// streams; Bayes tests use a fixed threshold and two streams. One curve per recorded node.
std::vector<ErrorCurve> monte_carlo_errors(const NetworkModel& model, const Network& net,
                                           const MonteCarloConfig& config);

}  // namespace netdetect
