#include "netdetect/graph_markov.hpp"

#include "netdetect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace netdetect {

namespace {

constexpr double kReversibilityTolerance = 1e-10;
constexpr double kZeroModulus = 1e-13;

std::string format_components(const std::vector<Component>& comps) {
    std::ostringstream os;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        os << (c ? " " : "") << "{";
        for (std::size_t k = 0; k < comps[c].size(); ++k) os << (k ? "," : "") << comps[c][k];
        os << "}";
    }
    return os.str();
}

[[noreturn]] void throw_reducible(const DirectedGraph& g) {
    auto comps = scc_decomposition(g);
    throw ReducibleChainError("consensus chain is reducible; components " + format_components(comps),
                              std::move(comps));
}

// Stationary law of the sub-chain restricted to a closed class.
Vector stationary_on_class(const Eigen::MatrixXd& w, const Component& cls) {
    const auto k = static_cast<Eigen::Index>(cls.size());
    Eigen::MatrixXd a(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
        for (Eigen::Index c = 0; c < k; ++c)
            a(r, c) = w(static_cast<Eigen::Index>(cls[static_cast<std::size_t>(c)]),
                        static_cast<Eigen::Index>(cls[static_cast<std::size_t>(r)]));
    a -= Eigen::MatrixXd::Identity(k, k);
    a.row(k - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    b(k - 1) = 1.0;
    Eigen::VectorXd sol = a.fullPivLu().solve(b);
    Vector pi(static_cast<std::size_t>(w.rows()), 0.0);
    for (Eigen::Index r = 0; r < k; ++r) pi[cls[static_cast<std::size_t>(r)]] = sol(r);
    return pi;
}

}  // namespace

// ---------------------------------------------------------------------------
// DirectedGraph

DirectedGraph::DirectedGraph(std::size_t n) : adjacency_(n) {}

DirectedGraph::DirectedGraph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
    : adjacency_(n) {
    for (const auto& [i, j] : edges) add_edge(i, j);
}

void DirectedGraph::add_edge(std::size_t i, std::size_t j) {
    const std::size_t n = size();
    if (i >= n || j >= n) {
        throw InvalidArgument("edge (" + std::to_string(i) + "," + std::to_string(j) +
                              ") out of range for n=" + std::to_string(n));
    }
    auto& nbrs = adjacency_[i];
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), j);
    if (it != nbrs.end() && *it == j) {
        throw InvalidArgument("duplicate edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    nbrs.insert(it, j);
    ++edge_count_;
}

bool DirectedGraph::has_edge(std::size_t i, std::size_t j) const {
    if (i >= size()) return false;
    const auto& nbrs = adjacency_[i];
    return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

std::vector<std::pair<std::size_t, std::size_t>> DirectedGraph::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(edge_count_);
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j : adjacency_[i]) out.emplace_back(i, j);
    return out;
}

// ---------------------------------------------------------------------------
// WeightMatrix

WeightMatrix::WeightMatrix(Eigen::MatrixXd w) : w_(std::move(w)) {
    if (w_.rows() != w_.cols() || w_.rows() == 0) {
        throw InvalidArgument("weight matrix must be square and non-empty");
    }
    for (Eigen::Index i = 0; i < w_.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < w_.cols(); ++j) {
            const double v = w_(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                throw InvalidArgument("weight matrix entry (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") is negative or not finite");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream os;
            os.precision(17);
            os << "row " << i << " of the weight matrix sums to " << sum << ", not 1";
            throw InvalidArgument(os.str());
        }
    }
    build_sparse();
}

WeightMatrix::WeightMatrix(Eigen::MatrixXd w, const DirectedGraph& g) : WeightMatrix(std::move(w)) {
    if (g.size() != size()) throw InvalidArgument("graph and weight matrix sizes differ");
    for (std::size_t i = 0; i < size(); ++i)
        for (const auto& e : row(i))
            if (!g.has_edge(i, e.col)) {
                throw InvalidArgument("positive weight on (" + std::to_string(i) + "," +
                                      std::to_string(e.col) + ") which is not an edge");
            }
}

WeightMatrix WeightMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(r.size()) != n) throw InvalidArgument("weight matrix rows must have length n");
        for (Eigen::Index j = 0; j < n; ++j) w(i, j) = r[static_cast<std::size_t>(j)];
    }
    return WeightMatrix(std::move(w));
}

void WeightMatrix::build_sparse() {
    const std::size_t n = size();
    row_start_.assign(n + 1, 0);
    entries_.clear();
    for (std::size_t i = 0; i < n; ++i) {
        row_start_[i] = entries_.size();
        for (std::size_t j = 0; j < n; ++j) {
            const double v = (*this)(i, j);
            if (v > 0.0) entries_.push_back({j, v});
        }
    }
    row_start_[n] = entries_.size();
}

DirectedGraph WeightMatrix::support() const {
    DirectedGraph g(size());
    for (std::size_t i = 0; i < size(); ++i)
        for (const auto& e : row(i)) g.add_edge(i, e.col);
    return g;
}

void WeightMatrix::left_multiply(std::span<const double> x, std::span<double> out) const {
    const std::size_t n = size();
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        for (const auto& e : row(i)) out[e.col] += xi * e.weight;
    }
}

void WeightMatrix::right_multiply(std::span<const double> x, std::span<double> out) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const auto& e : row(i)) acc += e.weight * x[e.col];
        out[i] = acc;
    }
}

bool WeightMatrix::is_doubly_stochastic(double tol) const {
    for (Eigen::Index j = 0; j < w_.cols(); ++j)
        if (std::abs(w_.col(j).sum() - 1.0) > tol) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Network

void Network::require_ergodic() const {
    if (!profile.irreducible) throw_reducible(weights.support());
    if (!profile.aperiodic) {
        throw AssumptionViolated("consensus chain is periodic with period " + std::to_string(profile.period));
    }
}

void Network::require_reversible() const {
    require_ergodic();
    if (!profile.reversible) {
        throw AssumptionViolated("consensus chain is not reversible (pi_i W_ij != pi_j W_ji)");
    }
}

Network analyze(WeightMatrix w) {
    SpectralProfile p = spectral_profile(w);
    return Network{std::move(w), std::move(p)};
}

// ---------------------------------------------------------------------------
// Topologies

WeightMatrix uniform_weights(const DirectedGraph& g) {
    const std::size_t n = g.size();
    if (n == 0) throw InvalidArgument("graph has no nodes");
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nbrs = g.neighbors(i);
        if (nbrs.empty()) throw InvalidArgument("node " + std::to_string(i) + " has an empty neighbourhood");
        const double share = 1.0 / static_cast<double>(nbrs.size());
        for (std::size_t j : nbrs) w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = share;
    }
    return WeightMatrix(std::move(w), g);
}

DirectedGraph generate_scale_free(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (m < 1 || m >= n) {
        throw InvalidArgument("scale-free generator needs 1 <= m < n (got m=" + std::to_string(m) +
                              ", n=" + std::to_string(n) + ")");
    }
    std::mt19937_64 rng(seed);
    std::set<std::pair<std::size_t, std::size_t>> undirected;
    // Every edge endpoint appears once, so uniform draws are degree-proportional.
    std::vector<std::size_t> endpoints;

    for (std::size_t u = 0; u <= m; ++u)
        for (std::size_t v = u + 1; v <= m; ++v) {
            undirected.emplace(u, v);
            endpoints.push_back(u);
            endpoints.push_back(v);
        }

    std::vector<std::size_t> targets;
    for (std::size_t v = m + 1; v < n; ++v) {
        targets.clear();
        while (targets.size() < m) {
            std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
            const std::size_t u = endpoints[pick(rng)];
            if (std::find(targets.begin(), targets.end(), u) == targets.end()) targets.push_back(u);
        }
        for (std::size_t u : targets) {
            undirected.emplace(u, v);
            endpoints.push_back(u);
            endpoints.push_back(v);
        }
    }

    DirectedGraph g(n);
    for (std::size_t i = 0; i < n; ++i) g.add_edge(i, i);
    for (const auto& [u, v] : undirected) {
        g.add_edge(u, v);
        g.add_edge(v, u);
    }
    return g;
}

DirectedGraph bidirectional_ring(std::size_t n, bool self_loops) {
    if (n < 3) throw InvalidArgument("ring needs at least 3 nodes");
    DirectedGraph g(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (self_loops) g.add_edge(i, i);
        g.add_edge(i, (i + 1) % n);
        g.add_edge(i, (i + n - 1) % n);
    }
    return g;
}

DirectedGraph directed_cycle(std::size_t n) {
    if (n < 2) throw InvalidArgument("cycle needs at least 2 nodes");
    DirectedGraph g(n);
    for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

DirectedGraph complete_graph(std::size_t n, bool self_loops) {
    DirectedGraph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j || self_loops) g.add_edge(i, j);
    return g;
}

// ---------------------------------------------------------------------------
// Analysis

std::vector<Component> scc_decomposition(const DirectedGraph& g) {
    // Iterative Tarjan. Components are emitted sinks-first, i.e. closed classes first.
    const std::size_t n = g.size();
    constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<Component> comps;
    std::size_t counter = 0;

    struct Frame {
        std::size_t node;
        std::size_t next;
    };
    std::vector<Frame> call;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!call.empty()) {
            Frame& f = call.back();
            const auto& nbrs = g.neighbors(f.node);
            if (f.next < nbrs.size()) {
                const std::size_t w = nbrs[f.next++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
                continue;
            }
            const std::size_t v = f.node;
            call.pop_back();
            if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
            if (low[v] == index[v]) {
                Component comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    std::reverse(comps.begin(), comps.end());
    return comps;
}

bool is_strongly_connected(const DirectedGraph& g) {
    if (g.size() == 0) return false;
    return scc_decomposition(g).size() == 1;
}

Vector stationary_distribution(const WeightMatrix& w) {
    const DirectedGraph g = w.support();
    if (!is_strongly_connected(g)) throw_reducible(g);
    Component all(w.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return stationary_on_class(w.dense(), all);
}

std::size_t period(const WeightMatrix& w) {
    const DirectedGraph g = w.support();
    if (!is_strongly_connected(g)) throw_reducible(g);
    const std::size_t n = g.size();
    std::vector<long long> level(n, -1);
    std::queue<std::size_t> queue;
    level[0] = 0;
    queue.push(0);
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop();
        for (std::size_t v : g.neighbors(u))
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                queue.push(v);
            }
    }
    long long d = 0;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v : g.neighbors(u)) d = std::gcd(d, std::llabs(level[u] + 1 - level[v]));
    return static_cast<std::size_t>(d);
}

SpectralProfile spectral_profile(const WeightMatrix& w) {
    SpectralProfile p;
    const std::size_t n = w.size();
    const DirectedGraph g = w.support();
    const auto comps = scc_decomposition(g);
    p.irreducible = comps.size() == 1;
    if (p.irreducible) {
        p.pi = stationary_on_class(w.dense(), comps.front());
        p.period = period(w);
        p.aperiodic = p.period == 1;
    } else {
        p.pi = stationary_on_class(w.dense(), comps.back());
        p.period = 0;
        p.aperiodic = false;
    }

    p.reversible = p.irreducible;
    for (std::size_t i = 0; i < n && p.reversible; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(p.pi[i] * w(i, j) - p.pi[j] * w(j, i)) > kReversibilityTolerance) {
                p.reversible = false;
                break;
            }

    const auto nn = static_cast<Eigen::Index>(n);
    if (p.reversible) {
        // D^{1/2} W D^{-1/2} is symmetric for a reversible chain.
        Eigen::VectorXd sq(nn);
        for (Eigen::Index i = 0; i < nn; ++i) sq(i) = std::sqrt(p.pi[static_cast<std::size_t>(i)]);
        Eigen::MatrixXd s(nn, nn);
        for (Eigen::Index i = 0; i < nn; ++i)
            for (Eigen::Index j = 0; j < nn; ++j) s(i, j) = sq(i) * w.dense()(i, j) / sq(j);
        s = 0.5 * (s + s.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
        std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + nn);
        std::sort(ev.begin(), ev.end(), std::greater<>());
        p.rho = n > 1 ? std::max(ev[1], std::abs(ev.back())) : 0.0;
        for (double v : ev) p.eigenvalue_moduli.push_back(std::abs(v));
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> es(w.dense(), false);
        std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + nn);
        // Drop one copy of the Perron eigenvalue 1.
        auto unit = std::min_element(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
            return std::abs(a - 1.0) < std::abs(b - 1.0);
        });
        double rho = 0.0;
        for (auto it = ev.begin(); it != ev.end(); ++it)
            if (it != unit) rho = std::max(rho, std::abs(*it));
        p.rho = rho;
        for (const auto& v : ev) p.eigenvalue_moduli.push_back(std::abs(v));
    }
    std::sort(p.eigenvalue_moduli.begin(), p.eigenvalue_moduli.end(), std::greater<>());
    // Round-off from the eigensolver; an averaging matrix has rho exactly 0.
    if (p.rho < kZeroModulus) p.rho = 0.0;
    return p;
}

double imbalance(std::span<const double> pi, ImbalanceNorm norm) {
    const double u = 1.0 / static_cast<double>(pi.size());
    double acc = 0.0;
    for (double v : pi) {
        const double d = v - u;
        acc += norm == ImbalanceNorm::l2 ? d * d : std::abs(d);
    }
    return norm == ImbalanceNorm::l2 ? std::sqrt(acc) : 0.5 * acc;
}

Vector matrix_power_row(const WeightMatrix& w, std::size_t i, std::size_t t) {
    const std::size_t n = w.size();
    if (i >= n) throw InvalidArgument("node index out of range");
    Vector row(n, 0.0), next(n);
    row[i] = 1.0;
    for (std::size_t s = 0; s < t; ++s) {
        w.left_multiply(row, next);
        row.swap(next);
    }
    return row;
}

double deviation_factor(double pi_i, DeviationFactor which) {
    if (which == DeviationFactor::classical) return (1.0 - pi_i) / pi_i;
    if (pi_i >= 1.0) return std::numeric_limits<double>::infinity();
    return pi_i / (1.0 - pi_i);
}

DeviationBound deviation_bound(const Network& net, std::size_t i, std::size_t t, std::span<const double> r,
                               DeviationFactor factor) {
    net.require_reversible();
    const std::size_t n = net.size();
    if (r.size() != n) throw InvalidArgument("weight vector length must equal n");
    if (i >= n) throw InvalidArgument("node index out of range");
    const auto& pi = net.profile.pi;
    const Vector row = matrix_power_row(net.weights, i, t);
    double exact = 0.0, energy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (r[j] < 0.0) throw InvalidArgument("deviation weights must be nonnegative");
        exact += std::abs(row[j] - pi[j]) * r[j];
        energy += pi[j] * r[j] * r[j];
    }
    const double f = deviation_factor(pi[i], factor);
    const double scale = (std::isinf(f) && energy == 0.0) ? 0.0 : std::sqrt(f * energy);
    return {exact, scale * std::pow(net.profile.rho, static_cast<double>(t))};
}

}  // namespace netdetect
