#pragma once

// Directed network topology, consensus weight matrices and Markov-chain analysis
// of the consensus matrix (stationary law, spectrum, period, SCCs, mixing bounds).

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace netdetect {

using Vector = std::vector<double>;
using Component = std::vector<std::size_t>;

/// Directed graph on nodes 0..n-1. An edge (i, j) means "i grabs information from j",
/// i.e. j is in the neighbourhood N(i). Self-loops are allowed, duplicates are not.
class DirectedGraph {
public:
    explicit DirectedGraph(std::size_t n = 0);
    DirectedGraph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

    /// Throws InvalidArgument on out-of-range endpoints or a duplicate edge.
    void add_edge(std::size_t i, std::size_t j);
    bool has_edge(std::size_t i, std::size_t j) const;

    std::size_t size() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    /// N(i), sorted ascending.
    const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }

    /// All edges in lexicographic order.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    bool operator==(const DirectedGraph&) const = default;

private:
    std::vector<std::vector<std::size_t>> adjacency_;
    std::size_t edge_count_ = 0;
};

/// Right-stochastic consensus matrix. Row i holds node i's confidence in its neighbours.
/// Immutable; keeps a compressed copy of the nonzero pattern for the update kernels.
class WeightMatrix {
public:
    struct Entry {
        std::size_t col;
        double weight;
    };

    static constexpr double kRowSumTolerance = 1e-12;

    explicit WeightMatrix(Eigen::MatrixXd w);
    /// Also checks that the support of w is contained in the edge set of g.
    WeightMatrix(Eigen::MatrixXd w, const DirectedGraph& g);

    static WeightMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return static_cast<std::size_t>(w_.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return w_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Eigen::MatrixXd& dense() const noexcept { return w_; }

    /// Nonzero entries of row i (self weight included), ordered by column.
    std::span<const Entry> row(std::size_t i) const {
        return {entries_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
    }

    /// Graph whose edges are the strictly positive entries.
    DirectedGraph support() const;

    /// out = x W  (row vector times matrix).
    void left_multiply(std::span<const double> x, std::span<double> out) const;
    /// out = W x.
    void right_multiply(std::span<const double> x, std::span<double> out) const;

    bool is_doubly_stochastic(double tol = 1e-12) const;

private:
    void build_sparse();

    Eigen::MatrixXd w_;
    std::vector<Entry> entries_;
    std::vector<std::size_t> row_start_;
};

struct SpectralProfile {
    Vector pi;                 ///< stationary distribution
    double rho = 0.0;          ///< second-largest eigenvalue modulus
    bool reversible = false;
    bool irreducible = false;
    bool aperiodic = false;
    std::size_t period = 1;    ///< 0 when the chain is reducible (period undefined)
    std::vector<double> eigenvalue_moduli;  ///< sorted descending
};

/// A weight matrix together with its Markov-chain analysis. This is what the learning,
/// detection and exponent layers consume.
struct Network {
    WeightMatrix weights;
    SpectralProfile profile;

    std::size_t size() const noexcept { return weights.size(); }
    /// Throws ReducibleChainError / AssumptionViolated unless irreducible and aperiodic.
    void require_ergodic() const;
    /// Additionally requires reversibility.
    void require_reversible() const;
};

Network analyze(WeightMatrix w);

// ---------------------------------------------------------------------------
// Topologies

/// w[i][j] = 1/|N(i)| for j in N(i). Throws if some node has an empty neighbourhood.
WeightMatrix uniform_weights(const DirectedGraph& g);

/// Barabasi-Albert preferential attachment with parameter m, symmetrised into
/// bidirectional edge pairs, plus a self-loop on every node. Deterministic per seed.
DirectedGraph generate_scale_free(std::size_t n, std::size_t m, std::uint64_t seed);

DirectedGraph bidirectional_ring(std::size_t n, bool self_loops);
DirectedGraph directed_cycle(std::size_t n);
DirectedGraph complete_graph(std::size_t n, bool self_loops);

// ---------------------------------------------------------------------------
// Markov-chain analysis

bool is_strongly_connected(const DirectedGraph& g);

/// Strongly connected components ordered so that edges only go from earlier to later
/// components: information flows from later components into earlier ones, and
/// closed classes (no outgoing dependence) come last.
std::vector<Component> scc_decomposition(const DirectedGraph& g);

/// Solves (W^T - I) pi = 0 with the normalisation row. Throws ReducibleChainError.
Vector stationary_distribution(const WeightMatrix& w);

SpectralProfile spectral_profile(const WeightMatrix& w);

/// Common period of an irreducible chain; 1 iff aperiodic. Throws on reducible input.
std::size_t period(const WeightMatrix& w);

enum class ImbalanceNorm { l2, tv };

/// Distance between pi and the uniform distribution.
double imbalance(std::span<const double> pi, ImbalanceNorm norm);

/// Row i of W^t by repeated vector-matrix products.
Vector matrix_power_row(const WeightMatrix& w, std::size_t i, std::size_t t);

/// Node factor multiplying sum_j pi_j r_j^2 inside the mixing bound.
///   classical: (1 - pi_i) / pi_i      stated: pi_i / (1 - pi_i)
enum class DeviationFactor { classical, stated };

double deviation_factor(double pi_i, DeviationFactor which);

struct DeviationBound {
    double exact;  ///< sum_j |[W^t]_ij - pi_j| r_j
    double bound;  ///< sqrt(factor_i * sum_j pi_j r_j^2) * rho^t
};

/// Requires a reversible, irreducible, aperiodic chain (AssumptionViolated otherwise).
DeviationBound deviation_bound(const Network& net, std::size_t i, std::size_t t,
                               std::span<const double> r,
                               DeviationFactor factor = DeviationFactor::classical);

}  // namespace netdetect
