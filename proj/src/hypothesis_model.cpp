#include "netdetect/hypothesis_model.hpp"

#include "netdetect/errors.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace netdetect {

namespace {

constexpr double kProbabilitySumTolerance = 1e-12;

std::size_t symbol_index(const NodeDistribution& d, double x) {
    const double k = std::floor(x);
    if (k != x || k < 0.0 || k >= static_cast<double>(d.probs().size())) {
        throw InvalidArgument("observation " + std::to_string(x) + " outside the discrete support");
    }
    return static_cast<std::size_t>(k);
}

double log_sum_exp(const Vector& v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

void require_same_kind(const NodeDistribution& a, const NodeDistribution& b) {
    if (!same_kind(a, b)) throw InvalidArgument("distributions of different kinds or alphabets");
}

}  // namespace

NodeDistribution NodeDistribution::bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("bernoulli parameter must lie in (0,1), got " + std::to_string(p));
    NodeDistribution d;
    d.kind_ = Kind::bernoulli;
    d.probs_ = {1.0 - p, p};
    return d;
}

NodeDistribution NodeDistribution::gaussian(double mean, double variance) {
    if (!std::isfinite(mean) || !(variance > 0.0) || !std::isfinite(variance)) {
        throw InvalidArgument("gaussian needs a finite mean and positive variance");
    }
    NodeDistribution d;
    d.kind_ = Kind::gaussian;
    d.mean_ = mean;
    d.variance_ = variance;
    return d;
}

NodeDistribution NodeDistribution::categorical(std::vector<double> probs) {
    if (probs.size() < 2) throw InvalidArgument("categorical alphabet needs at least two symbols");
    double sum = 0.0;
    for (double v : probs) {
        if (!(v > 0.0)) throw InvalidArgument("categorical probabilities must be strictly positive");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance) throw InvalidArgument("categorical probabilities must sum to 1");
    NodeDistribution d;
    d.kind_ = Kind::categorical;
    d.probs_ = std::move(probs);
    return d;
}

double NodeDistribution::log_density(double x) const {
    if (kind_ == Kind::gaussian) {
        const double z = x - mean_;
        return -0.5 * (z * z / variance_ + std::log(2.0 * std::numbers::pi * variance_));
    }
    return std::log(probs_[symbol_index(*this, x)]);
}

double NodeDistribution::draw(Engine& rng) const {
    if (kind_ == Kind::gaussian) return std::normal_distribution<double>(mean_, std::sqrt(variance_))(rng);
    const double u = uniform01(rng);
    double cum = 0.0;
    for (std::size_t k = 0; k + 1 < probs_.size(); ++k) {
        cum += probs_[k];
        if (u < cum) return static_cast<double>(k);
    }
    return static_cast<double>(probs_.size() - 1);
}

bool same_kind(const NodeDistribution& a, const NodeDistribution& b) {
    return a.kind() == b.kind() && a.probs().size() == b.probs().size();
}

double kl(const NodeDistribution& p, const NodeDistribution& q) {
    require_same_kind(p, q);
    if (p.kind() == NodeDistribution::Kind::gaussian) {
        const double dm = p.mean() - q.mean();
        const double ratio = p.variance() / q.variance();
        return 0.5 * (ratio + dm * dm / q.variance() - 1.0 - std::log(ratio));
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < p.probs().size(); ++k) acc += p.probs()[k] * std::log(p.probs()[k] / q.probs()[k]);
    return std::max(acc, 0.0);
}

double log_affinity(const NodeDistribution& p, const NodeDistribution& q, double s) {
    require_same_kind(p, q);
    if (p.kind() == NodeDistribution::Kind::gaussian) {
        const double a0 = 1.0 / p.variance(), a1 = 1.0 / q.variance();
        const double prec = s * a0 + (1.0 - s) * a1;
        if (!(prec > 0.0)) return std::numeric_limits<double>::infinity();
        const double b = s * a0 * p.mean() + (1.0 - s) * a1 * q.mean();
        const double c = s * a0 * p.mean() * p.mean() + (1.0 - s) * a1 * q.mean() * q.mean();
        return 0.5 * (s * std::log(a0) + (1.0 - s) * std::log(a1) - std::log(prec)) - 0.5 * (c - b * b / prec);
    }
    Vector terms(p.probs().size());
    for (std::size_t k = 0; k < terms.size(); ++k)
        terms[k] = s * std::log(p.probs()[k]) + (1.0 - s) * std::log(q.probs()[k]);
    return log_sum_exp(terms);
}

NodeDistribution tilt(const NodeDistribution& p, const NodeDistribution& q, double theta) {
    require_same_kind(p, q);
    if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("tilt parameter must lie in [0,1]");
    if (theta == 0.0) return p;
    if (theta == 1.0) return q;
    if (p.kind() == NodeDistribution::Kind::gaussian) {
        const double a0 = 1.0 / p.variance(), a1 = 1.0 / q.variance();
        const double prec = (1.0 - theta) * a0 + theta * a1;
        return NodeDistribution::gaussian(((1.0 - theta) * a0 * p.mean() + theta * a1 * q.mean()) / prec, 1.0 / prec);
    }
    Vector logw(p.probs().size());
    for (std::size_t k = 0; k < logw.size(); ++k)
        logw[k] = (1.0 - theta) * std::log(p.probs()[k]) + theta * std::log(q.probs()[k]);
    const double z = log_sum_exp(logw);
    Vector probs(logw.size());
    for (std::size_t k = 0; k < logw.size(); ++k) probs[k] = std::exp(logw[k] - z);
    // Renormalise away rounding so the categorical invariant holds.
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    for (double& v : probs) v /= total;
    if (p.kind() == NodeDistribution::Kind::bernoulli) return NodeDistribution::bernoulli(probs[1]);
    return NodeDistribution::categorical(std::move(probs));
}

// ---------------------------------------------------------------------------
// NetworkModel

NetworkModel::NetworkModel(std::vector<std::vector<NodeDistribution>> dist) : dist_(std::move(dist)) {
    if (dist_.empty()) throw InvalidArgument("model needs at least one node");
    const std::size_t m = dist_.front().size();
    if (m < 2) throw InvalidArgument("model needs at least two hypotheses");
    for (std::size_t i = 0; i < dist_.size(); ++i) {
        if (dist_[i].size() != m) throw InvalidArgument("node " + std::to_string(i) + " has the wrong number of hypotheses");
        for (std::size_t th = 1; th < m; ++th)
            if (!same_kind(dist_[i][0], dist_[i][th])) {
                throw InvalidArgument("node " + std::to_string(i) + " mixes distribution kinds across hypotheses");
            }
    }
}

NetworkModel NetworkModel::binary(const std::vector<std::pair<NodeDistribution, NodeDistribution>>& nodes) {
    std::vector<std::vector<NodeDistribution>> dist;
    dist.reserve(nodes.size());
    for (const auto& [h0, h1] : nodes) dist.push_back({h0, h1});
    return NetworkModel(std::move(dist));
}

NetworkModel NetworkModel::homogeneous(std::size_t n, const NodeDistribution& h0, const NodeDistribution& h1) {
    return binary(std::vector<std::pair<NodeDistribution, NodeDistribution>>(n, {h0, h1}));
}

void NetworkModel::require_binary() const {
    if (hypotheses() != 2) throw InvalidArgument("operation requires a binary model");
}

double NetworkModel::llr(std::size_t i, double x) const {
    require_binary();
    const auto& d0 = dist_.at(i)[0];
    const auto& d1 = dist_[i][1];
    if (d0.kind() == NodeDistribution::Kind::gaussian && d0.variance() == d1.variance()) {
        // Linear form; exact for equal variances, e.g. 2 m x / s2 for the symmetric pair.
        return (d1.mean() - d0.mean()) * (x - 0.5 * (d0.mean() + d1.mean())) / d0.variance();
    }
    return d1.log_density(x) - d0.log_density(x);
}

double NetworkModel::log_likelihood(std::size_t i, std::size_t theta, double x) const {
    return dist_.at(i).at(theta).log_density(x);
}

std::vector<Vector> NetworkModel::sample(std::size_t theta, std::size_t t, std::uint64_t seed) const {
    if (theta >= hypotheses()) throw InvalidArgument("hypothesis index out of range");
    Engine rng(seed);
    std::vector<Vector> out(size(), Vector(t));
    for (std::size_t s = 0; s < t; ++s)
        for (std::size_t i = 0; i < size(); ++i) out[i][s] = dist_[i][theta].draw(rng);
    return out;
}

bool NetworkModel::is_symmetric_gaussian() const {
    if (hypotheses() != 2) return false;
    const auto& ref = dist_.front()[1];
    if (ref.kind() != NodeDistribution::Kind::gaussian || !(ref.mean() > 0.0)) return false;
    for (const auto& node : dist_) {
        if (node[0].kind() != NodeDistribution::Kind::gaussian) return false;
        if (node[1].mean() != ref.mean() || node[0].mean() != -ref.mean()) return false;
        if (node[0].variance() != ref.variance() || node[1].variance() != ref.variance()) return false;
    }
    return true;
}

double kl(const NetworkModel& model, std::size_t i, std::size_t from_theta, std::size_t to_theta) {
    return kl(model.node(i, from_theta), model.node(i, to_theta));
}

double chernoff_objective(const NetworkModel& model, double lambda) {
    model.require_binary();
    double acc = 0.0;
    for (std::size_t j = 0; j < model.size(); ++j) acc -= log_affinity(model.node(j, 1), model.node(j, 0), lambda);
    return acc;
}

ChernoffResult chernoff_information(const NetworkModel& model) {
    model.require_binary();
    const auto best = detail::maximize_unimodal([&](double l) { return chernoff_objective(model, l); }, 0.0, 1.0);
    return {std::max(best.value, 0.0), best.argmax};
}

NodeDistribution tilted_node(const NetworkModel& model, std::size_t i, double theta_star) {
    model.require_binary();
    return tilt(model.node(i, 0), model.node(i, 1), theta_star);
}

bool LlrBounds::all_finite() const {
    return std::all_of(finite.begin(), finite.end(), [](bool f) { return f; });
}

LlrBounds llr_bounds(const NetworkModel& model) {
    model.require_binary();
    LlrBounds out;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto& d0 = model.node(i, 0);
        const auto& d1 = model.node(i, 1);
        if (!d0.is_discrete()) {
            out.bound.push_back(std::numeric_limits<double>::infinity());
            out.finite.push_back(false);
            continue;
        }
        double worst = 0.0;
        for (std::size_t k = 0; k < d0.probs().size(); ++k)
            worst = std::max(worst, std::abs(std::log(d1.probs()[k] / d0.probs()[k])));
        out.bound.push_back(worst);
        out.finite.push_back(true);
    }
    return out;
}

}  // namespace netdetect
