#pragma once

// Reference computations for the test suite. Each one takes a different route from the
// library (dense products instead of sparse kernels, eigenvectors instead of linear
// solves, grids instead of Brent, quadrature instead of closed forms) so agreement is
// evidence rather than tautology.

#include "netdetect/graph_markov.hpp"
#include "netdetect/hypothesis_model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using netdetect::Vector;
using Matrix = Eigen::MatrixXd;

inline Matrix dense_power(const Matrix& w, std::size_t t) {
    Matrix out = Matrix::Identity(w.rows(), w.cols());
    for (std::size_t k = 0; k < t; ++k) out = out * w;
    return out;
}

inline Vector row_of(const Matrix& m, std::size_t i) {
    Vector out(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(j)] = m(static_cast<Eigen::Index>(i), j);
    return out;
}

/// Left Perron vector from the eigen decomposition of W^T.
inline Vector stationary(const Matrix& w) {
    Eigen::EigenSolver<Matrix> es(w.transpose());
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k)
        if (std::abs(es.eigenvalues()[k] - 1.0) < std::abs(es.eigenvalues()[best] - 1.0)) best = k;
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    v /= v.sum();
    return Vector(v.data(), v.data() + v.size());
}

/// Sorted eigenvalue moduli, descending.
inline Vector eigen_moduli(const Matrix& w) {
    Eigen::EigenSolver<Matrix> es(w);
    Vector out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(std::abs(es.eigenvalues()[k]));
    std::sort(out.rbegin(), out.rend());
    return out;
}

/// gcd{t <= limit : [W^t]_00 > 0} on the boolean support.
inline std::size_t brute_period(const Matrix& w, std::size_t limit) {
    Eigen::MatrixXi a = (w.array() > 0.0).cast<int>();
    Eigen::MatrixXi p = a;
    std::size_t g = 0;
    for (std::size_t t = 1; t <= limit; ++t) {
        if (p(0, 0) > 0) g = std::gcd(g, t);
        p = ((p * a).array() > 0).cast<int>();
    }
    return g;
}

/// Transitive closure by Floyd-Warshall.
inline bool strongly_connected(const netdetect::DirectedGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        reach[i][i] = true;
        for (std::size_t j : g.neighbors(i)) reach[i][j] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!reach[i][j]) return false;
    return true;
}

inline double kl_discrete(const Vector& p, const Vector& q) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += p[k] * std::log(p[k] / q[k]);
    return s;
}

/// sum_x p^s q^(1-s).
inline double affinity_discrete(const Vector& p, const Vector& q, double s) {
    double a = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) a += std::pow(p[k], s) * std::pow(q[k], 1.0 - s);
    return a;
}

inline double gaussian_pdf(double x, double mean, double var) {
    return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

/// Composite Simpson rule on [lo, hi] with `steps` (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int steps = 20000) {
    const double h = (hi - lo) / steps;
    double s = f(lo) + f(hi);
    for (int k = 1; k < steps; ++k) s += f(lo + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline double kl_gaussian_quadrature(double m0, double v0, double m1, double v1) {
    return simpson([&](double x) {
        const double p = gaussian_pdf(x, m0, v0);
        return p > 0.0 ? p * std::log(p / gaussian_pdf(x, m1, v1)) : 0.0;
    }, -40.0, 40.0);
}

inline double affinity_gaussian_quadrature(double m0, double v0, double m1, double v1, double s) {
    return simpson([&](double x) {
        const double log0 = -(x - m0) * (x - m0) / (2.0 * v0) - 0.5 * std::log(2.0 * M_PI * v0);
        const double log1 = -(x - m1) * (x - m1) / (2.0 * v1) - 0.5 * std::log(2.0 * M_PI * v1);
        return std::exp(s * log0 + (1.0 - s) * log1);
    }, -40.0, 40.0);
}

struct GridMax {
    double value;
    double argmax;
};

inline GridMax grid_max(const std::function<double(double)>& f, double lo, double hi, double step) {
    GridMax best{f(lo), lo};
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
    for (std::size_t k = 1; k <= n; ++k) {
        const double x = lo + static_cast<double>(k) * step;
        const double v = f(x);
        if (v > best.value) best = {v, x};
    }
    return best;
}

/// The exponent objective for discrete models, written from probability vectors:
/// sum_j [s_j D(P0||P1) - log sum_x P0^s_j P1^(1-s_j)], s_j = lambda pi_j r_j.
inline double general_objective(const std::vector<Vector>& p0, const std::vector<Vector>& p1, const Vector& pi,
                                const Vector& r, double lambda) {
    double total = 0.0;
    for (std::size_t j = 0; j < p0.size(); ++j) {
        const double s = lambda * pi[j] * r[j];
        total += s * kl_discrete(p0[j], p1[j]) - std::log(affinity_discrete(p0[j], p1[j], s));
    }
    return total;
}

inline double normal_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Q^{-1}(p) by bisection.
inline double normal_q_inverse(double p) {
    double lo = -40.0, hi = 40.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (normal_q(mid) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Random instances

/// Irreducible, aperiodic: a random Hamiltonian cycle plus self-loops plus random extra edges.
inline Matrix random_ergodic(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::bernoulli_distribution extra(0.4);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(order[k]);
        const auto j = static_cast<Eigen::Index>(order[(k + 1) % n]);
        w(i, j) = u(rng);
        w(i, i) = u(rng);
    }
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            if (w(i, j) == 0.0 && extra(rng)) w(i, j) = u(rng);
    for (Eigen::Index i = 0; i < w.rows(); ++i) w.row(i) /= w.row(i).sum();
    return w;
}

/// Reversible: W_ij = C_ij / sum_k C_ik for a symmetric positive-diagonal C on a connected graph.
inline Matrix random_reversible(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::bernoulli_distribution extra(0.5);
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, i) = u(rng);
    for (Eigen::Index i = 1; i < c.rows(); ++i) {
        std::uniform_int_distribution<Eigen::Index> parent(0, i - 1);
        const auto p = parent(rng);
        c(i, p) = c(p, i) = u(rng);
    }
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = i + 1; j < c.cols(); ++j)
            if (c(i, j) == 0.0 && extra(rng)) c(i, j) = c(j, i) = u(rng);
    Matrix w = c;
    for (Eigen::Index i = 0; i < w.rows(); ++i) w.row(i) /= w.row(i).sum();
    return w;
}

inline Vector random_simplex(std::size_t k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Vector p(k);
    double s = 0.0;
    for (auto& v : p) s += v = u(rng);
    for (auto& v : p) v /= s;
    return p;
}

/// Random bernoulli or categorical binary model; returns the probability vectors too.
struct DiscreteInstance {
    netdetect::NetworkModel model;
    std::vector<Vector> p0, p1;
};

inline DiscreteInstance random_discrete_model(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> prob(0.1, 0.9);
    std::uniform_int_distribution<int> alphabet(2, 4);
    std::bernoulli_distribution use_bernoulli(0.5);
    std::vector<std::pair<netdetect::NodeDistribution, netdetect::NodeDistribution>> nodes;
    DiscreteInstance out{netdetect::NetworkModel::homogeneous(1, netdetect::NodeDistribution::bernoulli(0.5),
                                                              netdetect::NodeDistribution::bernoulli(0.5)),
                         {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        if (use_bernoulli(rng)) {
            const double a = prob(rng), b = prob(rng);
            nodes.emplace_back(netdetect::NodeDistribution::bernoulli(a), netdetect::NodeDistribution::bernoulli(b));
            out.p0.push_back({1.0 - a, a});
            out.p1.push_back({1.0 - b, b});
        } else {
            const auto k = static_cast<std::size_t>(alphabet(rng));
            auto a = random_simplex(k, rng), b = random_simplex(k, rng);
            nodes.emplace_back(netdetect::NodeDistribution::categorical(a), netdetect::NodeDistribution::categorical(b));
            out.p0.push_back(a);
            out.p1.push_back(b);
        }
    }
    out.model = netdetect::NetworkModel::binary(nodes);
    return out;
}

}  // namespace oracle
