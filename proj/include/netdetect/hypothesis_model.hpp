#pragma once

// Per-node observation laws under each hypothesis, sampling, log-likelihood ratios
// and the information measures built on them. All logarithms are natural.

#include "netdetect/graph_markov.hpp"
#include "netdetect/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace netdetect {

/// Observation law of a single node. Discrete kinds emit the symbol index as a double.
class NodeDistribution {
public:
    enum class Kind { bernoulli, gaussian, categorical };

    static NodeDistribution bernoulli(double p);
    static NodeDistribution gaussian(double mean, double variance);
    /// Probabilities must be strictly positive and sum to 1 within 1e-12.
    static NodeDistribution categorical(std::vector<double> probs);

    Kind kind() const noexcept { return kind_; }
    double p() const noexcept { return probs_[1]; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    /// Symbol probabilities for discrete kinds ({1-p, p} for bernoulli).
    const Vector& probs() const noexcept { return probs_; }
    bool is_discrete() const noexcept { return kind_ != Kind::gaussian; }

    /// log density (gaussian) or log mass (discrete). Throws outside the support.
    double log_density(double x) const;
    double draw(Engine& rng) const;

    bool operator==(const NodeDistribution&) const = default;

private:
    NodeDistribution() = default;

    Kind kind_ = Kind::bernoulli;
    Vector probs_;
    double mean_ = 0.0;
    double variance_ = 1.0;
};

bool same_kind(const NodeDistribution& a, const NodeDistribution& b);

/// D(p || q).
double kl(const NodeDistribution& p, const NodeDistribution& q);

/// log of the integral of p^s q^(1-s); +inf when it diverges (gaussians with s outside [0,1]).
double log_affinity(const NodeDistribution& p, const NodeDistribution& q, double s);

/// Normalised p^(1-theta) q^theta.
NodeDistribution tilt(const NodeDistribution& p, const NodeDistribution& q, double theta);

/// n nodes, M >= 2 hypotheses; node(i, theta) is the law of node i under hypothesis theta.
class NetworkModel {
public:
    explicit NetworkModel(std::vector<std::vector<NodeDistribution>> dist);

    /// Binary model from (H0, H1) pairs.
    static NetworkModel binary(const std::vector<std::pair<NodeDistribution, NodeDistribution>>& nodes);
    /// n copies of the same binary pair.
    static NetworkModel homogeneous(std::size_t n, const NodeDistribution& h0, const NodeDistribution& h1);

    std::size_t size() const noexcept { return dist_.size(); }
    std::size_t hypotheses() const noexcept { return dist_.empty() ? 0 : dist_.front().size(); }
    const NodeDistribution& node(std::size_t i, std::size_t theta) const { return dist_.at(i).at(theta); }

    /// log P_{i,1}(x) / P_{i,0}(x). Requires a binary model.
    double llr(std::size_t i, double x) const;
    double log_likelihood(std::size_t i, std::size_t theta, double x) const;
    double draw(std::size_t i, std::size_t theta, Engine& rng) const { return dist_[i][theta].draw(rng); }

    /// n x t table of independent draws under theta, deterministic per seed.
    std::vector<Vector> sample(std::size_t theta, std::size_t t, std::uint64_t seed) const;

    /// True when every node is N(-m, s2) under H0 and N(+m, s2) under H1 with one common (m, s2).
    bool is_symmetric_gaussian() const;

    void require_binary() const;

    bool operator==(const NetworkModel&) const = default;

private:
    std::vector<std::vector<NodeDistribution>> dist_;
};

double kl(const NetworkModel& model, std::size_t i, std::size_t from_theta, std::size_t to_theta);

/// f(lambda) = -sum_j log E_{P_{j,0}}[(P_{j,1}/P_{j,0})^lambda].
double chernoff_objective(const NetworkModel& model, double lambda);

struct ChernoffResult {
    double value;
    double theta_star;
};

/// Maximises chernoff_objective over [0, 1] with Brent's method.
ChernoffResult chernoff_information(const NetworkModel& model);

NodeDistribution tilted_node(const NetworkModel& model, std::size_t i, double theta_star);

struct LlrBounds {
    Vector bound;             ///< sup_x |llr_i(x)|, +inf when not finite
    std::vector<bool> finite;
    bool all_finite() const;
};

LlrBounds llr_bounds(const NetworkModel& model);

}  // namespace netdetect
